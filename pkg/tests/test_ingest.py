"""Readers, timestamp parsing, synthetic corpora, and result persistence."""

import json
from datetime import datetime, timezone

import numpy as np
import pytest

import eventflow.ingest as ingest
from eventflow import (
    BadTimestamp,
    Dataset,
    EventRecord,
    MissingColumn,
    OutcomeRecord,
    ParseError,
    QualityReport,
    SchemaVersionMismatch,
    SubgroupReport,
    SynthSpec,
    build_rdt,
    build_sa,
    generate_synthetic,
    kmeans,
    load_result,
    parse_timestamp,
    read_events,
    read_outcomes,
    save_result,
    segment,
    write_events_csv,
    write_outcomes_csv,
)
from eventflow.ingest import result_bytes


class TestParseTimestamp:
    def test_epoch_seconds_pass_through(self):
        assert parse_timestamp("1267401600") == 1267401600
        assert parse_timestamp(42) == 42
        assert parse_timestamp("-1") == -1

    def test_iso_with_z_suffix(self):
        assert parse_timestamp("2010-03-01T00:00:00Z") == 1267401600

    def test_date_only_is_midnight_utc(self):
        assert parse_timestamp("2014-06-01") == 1401580800

    def test_explicit_offset(self):
        assert parse_timestamp("2010-03-01T02:00:00+02:00") == 1267401600

    def test_naive_timestamps_assume_utc(self):
        expected = int(
            datetime(2010, 3, 1, 12, 30, tzinfo=timezone.utc).timestamp()
        )
        assert parse_timestamp("2010-03-01T12:30:00") == expected

    @pytest.mark.parametrize("bad", ["yesterday", "2010-13-40", "12:00", ""])
    def test_rejects_garbage(self, bad):
        with pytest.raises(BadTimestamp):
            parse_timestamp(bad)


class TestCsvReaders:
    def test_events_round_trip(self, tmp_path):
        records = [
            EventRecord("a", "x", 100, "blue"),
            EventRecord("a", "y", 200),
            EventRecord("b", "x", 300),
        ]
        path = tmp_path / "events.csv"
        write_events_csv(records, path)
        assert read_events(path) == records

    def test_outcomes_round_trip(self, tmp_path):
        records = [OutcomeRecord("a", "fail", 100), OutcomeRecord("b", "fail", 200)]
        path = tmp_path / "outcomes.csv"
        write_outcomes_csv(records, path)
        assert read_outcomes(path) == records

    def test_iso_timestamps_in_csv(self, tmp_path):
        path = tmp_path / "events.csv"
        path.write_text(
            "sequence_id,event_type,timestamp\na,x,2010-03-01T00:00:00Z\n"
        )
        assert read_events(path)[0].timestamp == 1267401600

    def test_missing_required_column(self, tmp_path):
        path = tmp_path / "events.csv"
        path.write_text("sequence_id,timestamp\na,100\n")
        with pytest.raises(MissingColumn, match="event_type"):
            read_events(path)

    def test_missing_value_reports_line(self, tmp_path):
        path = tmp_path / "events.csv"
        path.write_text("sequence_id,event_type,timestamp\na,x,100\nb,,200\n")
        with pytest.raises(ParseError, match="line 3"):
            read_events(path)

    def test_bad_timestamp_reports_line(self, tmp_path):
        path = tmp_path / "events.csv"
        path.write_text("sequence_id,event_type,timestamp\na,x,whenever\n")
        with pytest.raises(BadTimestamp, match="line 2"):
            read_events(path)

    def test_extra_columns_warn_but_parse(self, tmp_path):
        path = tmp_path / "events.csv"
        path.write_text("sequence_id,event_type,timestamp,notes\na,x,100,hi\n")
        with pytest.warns(UserWarning, match="notes"):
            records = read_events(path)
        assert records == [EventRecord("a", "x", 100)]

    def test_empty_file_yields_no_records(self, tmp_path):
        path = tmp_path / "events.csv"
        path.write_text("")
        assert read_events(path) == []

    def test_empty_attribute_becomes_none(self, tmp_path):
        path = tmp_path / "events.csv"
        path.write_text("sequence_id,event_type,timestamp,attribute\na,x,100,\n")
        assert read_events(path)[0].attribute is None


class TestJsonlReaders:
    def test_reads_jsonl_by_extension(self, tmp_path):
        path = tmp_path / "events.jsonl"
        rows = [
            {"sequence_id": "a", "event_type": "x", "timestamp": 100},
            {"sequence_id": "a", "event_type": "y", "timestamp": "2014-06-01"},
        ]
        path.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
        records = read_events(path)
        assert records[0] == EventRecord("a", "x", 100)
        assert records[1].timestamp == 1401580800

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "events.jsonl"
        path.write_text(
            '\n{"sequence_id": "a", "event_type": "x", "timestamp": 1}\n\n'
        )
        assert len(read_events(path)) == 1

    def test_invalid_json_reports_line(self, tmp_path):
        path = tmp_path / "events.jsonl"
        path.write_text('{"sequence_id": "a", "event_type": "x", "timestamp": 1}\nnot json\n')
        with pytest.raises(ParseError, match="line 2"):
            read_events(path)

    def test_non_object_row_rejected(self, tmp_path):
        path = tmp_path / "events.jsonl"
        path.write_text("[1, 2]\n")
        with pytest.raises(ParseError, match="not an object"):
            read_events(path)

    def test_explicit_format_overrides_extension(self, tmp_path):
        path = tmp_path / "events.txt"
        path.write_text('{"sequence_id": "a", "event_type": "x", "timestamp": 5}\n')
        assert read_events(path, fmt="jsonl") == [EventRecord("a", "x", 5)]

    def test_unknown_format_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            read_events(tmp_path / "whatever.csv", fmt="xml")


class TestSynthSpec:
    def test_pattern_must_use_alphabet_names(self):
        with pytest.raises(ValueError, match="outside the alphabet"):
            SynthSpec(n_sequences=5, n_event_types=3, planted_pattern=("nope",))

    def test_needs_a_non_pattern_type(self):
        with pytest.raises(ValueError, match="non-pattern"):
            SynthSpec(
                n_sequences=5, n_event_types=2, planted_pattern=("et00", "et01")
            )

    def test_span_must_fit_pattern(self):
        with pytest.raises(ValueError, match="too narrow"):
            SynthSpec(
                n_sequences=5,
                n_event_types=5,
                planted_pattern=("et00", "et01", "et02"),
                time_span=(0, 86_400),
            )

    def test_from_dict_parses_iso_span(self):
        spec = SynthSpec.from_dict(
            {
                "n_sequences": 5,
                "n_event_types": 4,
                "planted_pattern": ["et00"],
                "time_span": ["2010-01-01", "2011-01-01"],
            }
        )
        assert spec.time_span == (1262304000, 1293840000)


class TestGenerateSynthetic:
    def spec(self, **kw):
        base = dict(
            n_sequences=30,
            n_event_types=8,
            planted_pattern=("et00", "et01", "et02"),
            planted_fraction=0.5,
            noise_rate=2.0,
            seed=11,
        )
        base.update(kw)
        return SynthSpec(**base)

    def test_deterministic_under_seed(self):
        a = generate_synthetic(self.spec())
        b = generate_synthetic(self.spec())
        assert a == b
        c = generate_synthetic(self.spec(seed=12))
        assert a != c

    def test_pattern_appears_only_in_planted_sequences(self):
        events, outcomes = generate_synthetic(self.spec())
        pattern = {"et00", "et01", "et02"}
        with_pattern = {e.sequence_id for e in events if e.event_type in pattern}
        assert len(with_pattern) == 15  # floor(0.5 * 30)
        # planted sequences contain the full pattern in order
        for sid in with_pattern:
            seq = [e.event_type for e in events if e.sequence_id == sid]
            hits = [t for t in seq if t in pattern]
            assert hits == ["et00", "et01", "et02"]

    def test_every_sequence_has_events(self):
        events, _ = generate_synthetic(self.spec(noise_rate=0.0))
        assert len({e.sequence_id for e in events}) == 30

    def test_outcome_lands_after_pattern_end(self):
        events, outcomes = generate_synthetic(self.spec())
        assert len(outcomes) == 15  # p_pos = 1
        last_pattern = {}
        for e in events:
            if e.event_type in ("et00", "et01", "et02"):
                last_pattern[e.sequence_id] = max(
                    last_pattern.get(e.sequence_id, 0), e.timestamp
                )
        for o in outcomes:
            delta = o.timestamp - last_pattern[o.sequence_id]
            assert 86_400 <= delta <= 30 * 86_400

    def test_pattern_gaps_between_one_and_seven_days(self):
        events, _ = generate_synthetic(self.spec(noise_rate=0.0))
        by_sid = {}
        for e in events:
            by_sid.setdefault(e.sequence_id, []).append(e.timestamp)
        for stamps in by_sid.values():
            if len(stamps) < 2:
                continue
            for prev, cur in zip(stamps, stamps[1:]):
                assert 86_400 <= cur - prev <= 7 * 86_400

    def test_p_pos_zero_yields_no_outcomes(self):
        _, outcomes = generate_synthetic(self.spec(p_pos=0.0))
        assert outcomes == []

    def test_events_sorted_within_sequence(self):
        events, _ = generate_synthetic(self.spec(noise_rate=5.0))
        by_sid = {}
        for e in events:
            by_sid.setdefault(e.sequence_id, []).append(e.timestamp)
        for stamps in by_sid.values():
            assert stamps == sorted(stamps)


class TestPersistence:
    def test_dataset_round_trip(self, tmp_path, synth_dataset):
        ds = synth_dataset(seed=3)
        path = save_result(ds, tmp_path / "d.json")
        assert load_result(path) == ds

    def test_bytes_are_deterministic(self, synth_dataset):
        ds = synth_dataset(seed=4)
        assert result_bytes(ds) == result_bytes(ds)
        assert result_bytes(load_result(save_result(ds, "/tmp/ef_rt.json"))) == result_bytes(ds)

    def test_envelope_shape_and_config(self, tmp_path, synth_dataset):
        ds = synth_dataset(seed=5)
        path = save_result(ds, tmp_path / "d.json", config={"note": "hello"})
        doc = json.loads(path.read_text())
        assert doc["schema_version"] == 1
        assert doc["kind"] == "dataset"
        assert doc["config"] == {"note": "hello"}

    def test_model_round_trip(self, tmp_path, synth_dataset):
        ds = synth_dataset(seed=6)
        segs = segment(ds, 7 * 86_400)
        model = kmeans(segs, 4, seed=0, window=7 * 86_400, event_filter=list(range(8)))
        path = save_result(model, tmp_path / "m.json")
        assert load_result(path) == model

    def test_tree_round_trip_both_builders(self, tmp_path, synth_dataset):
        ds = synth_dataset(seed=7)
        for tree in (build_sa(ds), build_rdt(ds, "frequency", 0.01)):
            path = save_result(tree, tmp_path / f"{tree.method}.json")
            assert load_result(path) == tree

    def test_report_round_trips(self, tmp_path):
        q = QualityReport("sa", 0.01, 0.5, 12.0, 7, 1.0)
        s = SubgroupReport("msp", 0.3, 0.01, 4, 50.0, 10.0, [1, 2, 5, 8])
        assert load_result(save_result(q, tmp_path / "q.json")) == q
        assert load_result(save_result(s, tmp_path / "s.json")) == s

    def test_schema_version_checked(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"schema_version": 2, "kind": "dataset", "payload": {}}))
        with pytest.raises(SchemaVersionMismatch):
            load_result(path)

    def test_unknown_kind_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"schema_version": 1, "kind": "mystery", "payload": {}}))
        with pytest.raises(SchemaVersionMismatch, match="mystery"):
            load_result(path)

    def test_unserializable_object_rejected(self, tmp_path):
        with pytest.raises(TypeError):
            save_result(object(), tmp_path / "x.json")

    def test_timestamps_down_sampled_above_cap(self, tmp_path, synth_dataset, monkeypatch):
        monkeypatch.setattr(ingest, "TIMESTAMP_CAP", 5)
        ds = synth_dataset(seed=8, n_sequences=30)
        tree = build_sa(ds)
        doc = json.loads(save_result(tree, tmp_path / "t.json").read_text())
        sampled = [n for n in doc["payload"]["nodes"] if "timestamps_total" in n]
        assert sampled, "expected at least one node above the cap"
        for n in sampled:
            assert n["sampling_seed"] == n["node_id"]
            original = tree.node(n["node_id"]).event_timestamps
            for key, total in n["timestamps_total"].items():
                assert total == len(original[key]) > 5
                kept = n["event_timestamps"][key]
                assert len(kept) == 5
                assert kept == sorted(kept)
                assert set(kept) <= set(original[key])
