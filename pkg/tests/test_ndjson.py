import io
import json

import pytest
from hypothesis import given, settings

import strategies as sts
from openness.errors import EmptyInput, SchemaError
from openness.ingest import dataset_summary, dump_ndjson, dumps_ndjson, load_ndjson
from openness.model import DIAG_DANGLING_REFERENCE, DIAG_MALFORMED_LINE, EventKind


def test_small_fixture_matches_manifest(small_path, small_manifest):
    store = load_ndjson(small_path)
    summary = dataset_summary(store)
    assert summary.project_count == small_manifest["project_count"]
    assert summary.original_project_count == small_manifest["original_project_count"]
    assert summary.user_count == small_manifest["user_count"]
    assert summary.issue_count == small_manifest["issue_count"]
    assert summary.pr_count == small_manifest["pr_count"]
    assert summary.commit_count == small_manifest["commit_count"]
    assert len(store.memberships) == small_manifest["membership_count"]
    assert sum(len(v) for v in store.events.values()) == small_manifest["event_count"]


def test_minimal_file_loads_clean(tmp_path):
    path = tmp_path / "mini.ndjson"
    path.write_text(
        '{"type":"user","user_id":1,"login":"ada"}\n'
        '{"type":"project","project_id":1,"full_name":"ada/x","owner":1,'
        '"forked_from":null,"created_at":"2012-01-01T00:00:00Z"}\n'
    )
    store = load_ndjson(path)
    assert len(store.projects) == 1
    assert store.diagnostics == []


def test_dangling_project_reference_becomes_diagnostic(tmp_path):
    path = tmp_path / "dangling.ndjson"
    path.write_text(
        '{"type":"user","user_id":1,"login":"ada"}\n'
        '{"type":"project","project_id":1,"full_name":"ada/x","owner":1,'
        '"forked_from":null,"created_at":"2012-01-01T00:00:00Z"}\n'
        '{"type":"event","event_id":1,"kind":"PullRequestOpened","actor":1,'
        '"project":999,"subject_id":5,"at":"2012-02-01T00:00:00Z"}\n'
    )
    store = load_ndjson(path)
    dangling = [d for d in store.diagnostics if d.kind == DIAG_DANGLING_REFERENCE]
    assert len(dangling) == 1
    assert dangling[0].line_number == 3
    assert dangling[0].payload is not None  # nothing is lost
    assert sum(len(v) for v in store.events.values()) == 0


def test_strict_mode_raises_with_line_number(tmp_path):
    path = tmp_path / "bad.ndjson"
    path.write_text(
        '{"type":"user","user_id":1,"login":"ada"}\n'
        '{"type":"user","user_id":2}\n'
    )
    with pytest.raises(SchemaError) as excinfo:
        load_ndjson(path, strict=True)
    assert excinfo.value.line_number == 2
    assert excinfo.value.field == "login"


def test_lenient_mode_counts_malformed_lines(tmp_path):
    path = tmp_path / "mixed.ndjson"
    path.write_text(
        '{"type":"user","user_id":1,"login":"ada"}\n'
        "this is not json\n"
    )
    store = load_ndjson(path)
    assert len(store.users) == 1
    malformed = [d for d in store.diagnostics if d.kind == DIAG_MALFORMED_LINE]
    assert len(malformed) == 1
    assert malformed[0].line_number == 2


def test_empty_input_raises(tmp_path):
    path = tmp_path / "empty.ndjson"
    path.write_text("\n\n")
    with pytest.raises(EmptyInput):
        load_ndjson(path)


def test_missing_file_raises():
    with pytest.raises(FileNotFoundError):
        load_ndjson("does/not/exist.ndjson")


def test_line_order_does_not_matter(tmp_path):
    lines = [
        '{"type":"event","event_id":1,"kind":"IssueOpened","actor":1,"project":1,"subject_id":9,"at":"2012-02-01T00:00:00Z"}',
        '{"type":"project","project_id":1,"full_name":"ada/x","owner":1,"forked_from":null,"created_at":"2012-01-01T00:00:00Z"}',
        '{"type":"user","user_id":1,"login":"ada"}',
    ]
    path = tmp_path / "shuffled.ndjson"
    path.write_text("\n".join(lines) + "\n")
    store = load_ndjson(path)
    assert store.diagnostics == []
    assert len(store.project_events(1)) == 1


def test_serialization_is_deterministic(oracle_store):
    assert dumps_ndjson(oracle_store) == dumps_ndjson(oracle_store)


def test_oracle_fixture_round_trips(oracle_store, tmp_path):
    path = tmp_path / "dumped.ndjson"
    dump_ndjson(oracle_store, path)
    assert load_ndjson(path) == oracle_store


def test_dump_to_stream_counts_lines(oracle_store):
    buffer = io.StringIO()
    lines = dump_ndjson(oracle_store, buffer)
    assert lines == len(buffer.getvalue().splitlines())


def test_subject_id_types_preserved(tmp_path):
    path = tmp_path / "subjects.ndjson"
    path.write_text(
        '{"type":"user","user_id":1,"login":"ada"}\n'
        '{"type":"project","project_id":1,"full_name":"ada/x","owner":1,'
        '"forked_from":null,"created_at":"2012-01-01T00:00:00Z"}\n'
        '{"type":"event","event_id":1,"kind":"CommitAuthored","actor":1,'
        '"project":1,"subject_id":"f00dcafe","at":"2012-02-01T00:00:00Z"}\n'
    )
    store = load_ndjson(path)
    (event,) = store.project_events(1)
    assert event.subject_id == "f00dcafe"
    assert event.kind is EventKind.COMMIT_AUTHORED
    reloaded = json.loads(dumps_ndjson(store).splitlines()[-1])
    assert reloaded["subject_id"] == "f00dcafe"


@given(store=sts.event_stores())
@settings(max_examples=100, deadline=None)
def test_round_trip_generated_stores(store, tmp_path_factory):
    text = dumps_ndjson(store)
    path = tmp_path_factory.mktemp("rt") / "store.ndjson"
    path.write_text(text)
    assert load_ndjson(path) == store
