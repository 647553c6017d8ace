from decimal import Decimal

from ledgerflow.util import dsum, format_duration, mix64, to_json


def test_dsum_exact_on_many_small_amounts():
    values = [Decimal("0.01")] * 100_000
    assert dsum(values) == Decimal("1000.00")


def test_dsum_empty():
    assert dsum([]) == Decimal(0)


def test_mix64_range_and_spread():
    seen = {mix64(0, i) for i in range(1000)}
    assert len(seen) == 1000
    assert all(0 <= v < 2**64 for v in seen)


def test_format_duration():
    assert format_duration(0) == "0s"
    assert format_duration(104) == "1m 44s"
    assert format_duration(1179) == "19m 39s"
    assert format_duration(86_400 + 21 * 3600) == "1d 21h 0m 0s"


def test_to_json_renders_decimal_as_string():
    assert to_json({"volume": Decimal("12.30")}) == '{\n  "volume": "12.30"\n}\n'
