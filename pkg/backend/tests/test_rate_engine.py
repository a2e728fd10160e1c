import io
import json
import math

import pytest

from app.config import Settings
from app.core.rate_engine import RateEngine
from app.core.record_writer import format_value, write_records
from app.exceptions import DomainError, UsageError
from app.models.schemas import (
    RECORD_COLUMNS,
    SCAN_COLUMNS,
    Method,
    OutputFormat,
    PotentialKind,
    PotentialSpec,
    RateRequest,
    ReferenceKind,
    ScanRequest,
)
from app.services.spectra import energy_closed


@pytest.fixture
def engine() -> RateEngine:
    return RateEngine(Settings(TUNNEL_WKB_THREADS=2))


class TestComputeRate:
    def test_power_law_from_quantum_number(self, engine):
        result = engine.compute_rate(RateRequest(s=1.0, n=2, F=0.001))
        assert result.E == -0.125
        assert result.n == 2
        assert result.method is Method.EXACT

    def test_inverse_sqrt_from_quantum_number(self, engine):
        result = engine.compute_rate(RateRequest(s=0.5, n=2, F=1e-4))
        assert result.n == 2
        assert result.E == energy_closed(PotentialSpec.power_law(0.5), 2)
        assert result.method is Method.EXACT

    def test_power_law_needs_a_level(self, engine):
        with pytest.raises(UsageError):
            engine.compute_rate(RateRequest(s=1.0, F=0.001))

    def test_missing_field(self, engine):
        with pytest.raises(UsageError):
            engine.compute_rate(RateRequest(s=1.0, n=1))

    def test_invalid_exponent_is_a_domain_error(self, engine):
        with pytest.raises(DomainError):
            engine.compute_rate(RateRequest(s=2.5, E=-0.5, F=0.001))

    def test_quantized_level_for_general_exponent(self, engine):
        result = engine.compute_rate(RateRequest(s=1.5, n=1, mu=0.25, F=0.01))
        assert result.E < 0.0
        assert result.method is Method.ORACLE

    def test_log_level_through_energy(self, engine):
        spec = PotentialSpec.logarithmic(1.0, 1.0)
        E = energy_closed(spec, 2)
        by_energy = engine.compute_rate(RateRequest(potential=PotentialKind.LOGARITHMIC, E=E, F=0.002))
        by_level = engine.compute_rate(RateRequest(potential=PotentialKind.LOGARITHMIC, n=2, F=0.002))
        assert by_energy.n == pytest.approx(2.0, rel=1e-12)
        assert by_energy.exponent == pytest.approx(by_level.exponent, rel=1e-10)

    def test_reference_rate_uses_the_weak_field_threshold(self):
        strict = RateEngine(Settings(TUNNEL_WKB_THREADS=1, WEAK_FIELD_THRESHOLD=0.005))
        result = strict.reference_rate(ReferenceKind.HYDROGEN_1S, 0.01)
        assert result.validity_flags == ["reference_precondition"]
        assert RateEngine(Settings(TUNNEL_WKB_THREADS=1)).reference_rate(
            ReferenceKind.HYDROGEN_1S, 0.01).validity_flags == []


class TestScan:
    def test_rows_are_log_spaced_and_ordered(self, engine):
        response = engine.scan(ScanRequest(s=1.0, n=1, F_min=1e-4, F_max=1e-2, count=10))
        assert response.count == 10
        fields = [row["F"] for row in response.rows]
        assert fields[0] == pytest.approx(1e-4)
        assert fields[-1] == pytest.approx(1e-2)
        ratios = [b / a for a, b in zip(fields, fields[1:])]
        assert ratios == pytest.approx([ratios[0]] * 9)
        exponents = [row["exponent"] for row in response.rows]
        assert exponents == sorted(exponents)
        assert all(row["error"] == "" for row in response.rows)

    def test_failing_points_keep_their_row(self, engine):
        response = engine.scan(ScanRequest(s=1.0, n=1, F_min=0.01, F_max=0.2, count=4))
        assert response.count == 4
        assert response.rows[0]["error"] == ""
        assert response.rows[-1]["error"].startswith("domain:")
        assert response.rows[-1]["w"] is None
        assert set(response.rows[-1]) == set(SCAN_COLUMNS)

    def test_oracle_and_exact_converge_in_weak_fields(self, engine):
        exact = engine.scan(ScanRequest(s=1.0, n=1, F_min=2e-3, F_max=2e-2, count=3))
        oracle = engine.scan(ScanRequest(s=1.0, n=1, F_min=2e-3, F_max=2e-2, count=3,
                                         method=Method.ORACLE))
        ratios = [o["w"] / e["w"] for o, e in zip(oracle.rows, exact.rows)]
        assert ratios == pytest.approx([1.0, 1.0, 1.0], rel=1e-5)

    def test_inverted_range(self, engine):
        with pytest.raises(UsageError):
            engine.scan(ScanRequest(s=1.0, n=1, F_min=1e-2, F_max=1e-4, count=3))


def test_unknown_figure(engine):
    with pytest.raises(UsageError):
        engine.figure("fig9")


class TestRecordWriter:
    def test_full_precision(self):
        assert format_value(0.1) == "0.10000000000000001"
        assert format_value(None) == ""
        assert format_value(True) == "true"
        assert format_value(3) == "3"

    def test_csv(self, engine):
        record = engine.compute_rate(RateRequest(s=1.0, n=1, F=0.01)).to_record()
        stream = io.StringIO()
        assert write_records([record, record], RECORD_COLUMNS, stream) == 2
        lines = stream.getvalue().splitlines()
        assert lines[0] == ",".join(RECORD_COLUMNS)
        assert lines[1] == lines[2]
        assert len(lines[1].split(",")) == len(RECORD_COLUMNS)

    def test_json_round_trip_recomputes_w(self, engine):
        request = RateRequest(s=1.0, n=1, F=0.01, field_mode="ac")
        record = engine.compute_rate(request).to_record()
        stream = io.StringIO()
        write_records([record], RECORD_COLUMNS, stream, OutputFormat.JSON)
        parsed = json.loads(stream.getvalue())
        w = parsed["prefactor"] * math.exp(parsed["exponent"]) * parsed["ac_factor"]
        assert w == pytest.approx(parsed["w"], rel=1e-15)

    def test_json_maps_non_finite_to_null(self):
        stream = io.StringIO()
        write_records([{"w": float("nan")}], ["w"], stream, OutputFormat.JSON)
        assert json.loads(stream.getvalue()) == {"w": None}
