from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given, settings

import strategies as sts
from openness.errors import EmptyInput, NotACollaborator
from openness.model import EventKind, StoreBuilder
from openness.promotion import (
    dataset_promotion_distribution,
    first_action,
    project_promotion_stats,
    promotion_record,
)

T0 = datetime(2012, 1, 1, tzinfo=timezone.utc)


def _day(d: float) -> datetime:
    return T0 + timedelta(days=d)


def _promotion_store(first_mgmt_day=30.0, first_action_day=0.0, name="owner/proj"):
    """A collaborator who comments first (issue 500) and merges later (PR 10)."""
    b = StoreBuilder()
    owner = name.split("/")[0]
    for uid, login in enumerate([owner, f"{owner}-riser", f"{owner}-author"], start=1):
        b.add_user(uid, login)
    b.add_project(1, name, 1, None, T0)
    b.add_pull_request(10, 1, 3, _day(0), _day(first_mgmt_day), True, 99, 1)
    b.add_event(1, EventKind.ISSUE_OPENED, 3, 1, 500, _day(0))
    b.add_event(2, EventKind.PULL_REQUEST_OPENED, 3, 1, 10, _day(0))
    b.add_event(3, EventKind.ISSUE_COMMENT, 2, 1, 500, _day(first_action_day))
    b.add_event(4, EventKind.PULL_REQUEST_MERGED, 2, 1, 10, _day(first_mgmt_day))
    return b.build()


def test_first_action_is_minimum():
    b = StoreBuilder()
    b.add_user(1, "owner")
    b.add_user(2, "busy")
    b.add_project(1, "owner/proj", 1, None, T0)
    b.add_event(1, EventKind.ISSUE_COMMENT, 2, 1, 500, _day(3))
    b.add_event(2, EventKind.ISSUE_OPENED, 2, 1, 500, _day(1))
    b.add_event(3, EventKind.ISSUE_COMMENT, 2, 1, 500, _day(2))
    store = b.build()
    assert first_action(store.users[2], store.projects[1], store) == _day(1)


def test_first_action_absent_without_events():
    store = _promotion_store()
    assert first_action(store.users[1], store.projects[1], store) is None


def test_comment_then_merge_duration():
    store = _promotion_store()
    record = promotion_record(store.users[2], store.projects[1], store)
    assert record is not None
    assert record.first_action_at == _day(0)
    assert record.first_management_at == _day(30)
    assert record.duration_days == 30.0


def test_first_event_managerial_is_filtered():
    b = StoreBuilder()
    b.add_user(1, "owner")
    b.add_user(2, "insider")
    b.add_user(3, "author")
    b.add_project(1, "owner/proj", 1, None, T0)
    b.add_pull_request(10, 1, 3, _day(0), _day(5), True, 99, 1)
    b.add_event(1, EventKind.PULL_REQUEST_OPENED, 3, 1, 10, _day(0))
    b.add_event(2, EventKind.PULL_REQUEST_MERGED, 2, 1, 10, _day(5))
    store = b.build()
    assert promotion_record(store.users[2], store.projects[1], store) is None


def test_tie_at_identical_timestamp_is_filtered():
    store = _promotion_store(first_mgmt_day=30.0, first_action_day=30.0)
    assert promotion_record(store.users[2], store.projects[1], store) is None


def test_non_collaborator_rejected():
    store = _promotion_store()
    with pytest.raises(NotACollaborator):
        promotion_record(store.users[3], store.projects[1], store)


def test_project_stats_no_collaborators():
    b = StoreBuilder()
    b.add_user(1, "owner")
    b.add_project(1, "owner/proj", 1, None, T0)
    store = b.build()
    stats = project_promotion_stats(store.projects[1], store)
    assert stats.records == ()
    assert stats.mean_duration_days is None


def test_project_stats_mean_over_records():
    b = StoreBuilder()
    for uid, login in enumerate(["owner", "r1", "r2", "author"], start=1):
        b.add_user(uid, login)
    b.add_project(1, "owner/proj", 1, None, T0)
    b.add_pull_request(10, 1, 4, _day(0), _day(10), True, 99, 1)
    b.add_pull_request(11, 1, 4, _day(0), _day(20), True, 99, 1)
    b.add_event(1, EventKind.PULL_REQUEST_OPENED, 4, 1, 10, _day(0))
    b.add_event(2, EventKind.PULL_REQUEST_OPENED, 4, 1, 11, _day(0))
    b.add_event(3, EventKind.ISSUE_COMMENT, 2, 1, 500, _day(0))
    b.add_event(4, EventKind.ISSUE_COMMENT, 3, 1, 500, _day(0))
    b.add_event(5, EventKind.PULL_REQUEST_MERGED, 2, 1, 10, _day(10))
    b.add_event(6, EventKind.PULL_REQUEST_MERGED, 3, 1, 11, _day(20))
    store = b.build()
    stats = project_promotion_stats(store.projects[1], store)
    assert sorted(r.duration_days for r in stats.records) == [10.0, 20.0]
    assert stats.mean_duration_days == 15.0


def test_distribution_single_value_degenerate():
    store = _promotion_store()
    stats = project_promotion_stats(store.projects[1], store)
    summary = dataset_promotion_distribution([stats])
    assert summary.median == summary.q1 == summary.q3 == 30.0


def test_distribution_excludes_empty_projects_and_raises_when_none():
    b = StoreBuilder()
    b.add_user(1, "owner")
    b.add_project(1, "owner/proj", 1, None, T0)
    empty = project_promotion_stats(b.build().projects[1], b.build())
    with pytest.raises(EmptyInput):
        dataset_promotion_distribution([empty])


def test_distribution_labels_carry_project_names():
    store = _promotion_store()
    stats = project_promotion_stats(store.projects[1], store)
    summary = dataset_promotion_distribution([stats])
    assert summary.above_box == ()
    assert summary.n == 1


def test_slow_granter_flags_above_the_box():
    # one project promotes after 413.70 days; siblings shaped like the
    # reference distribution (quartiles near 74.83 / 147.83 / 225.05)
    means = {
        "a/p1": 30.0,
        "b/p2": 74.83,
        "c/p3": 120.0,
        "d/p4": 147.83,
        "e/p5": 180.0,
        "f/p6": 225.05,
        "g/p7": 260.0,
        "slow/search": 413.70,
    }
    stats = []
    for name, days in means.items():
        store = _promotion_store(first_mgmt_day=days, name=name)
        stats.append(project_promotion_stats(store.projects[1], store))
    summary = dataset_promotion_distribution(stats)
    above = {label for label, _ in summary.above_box}
    assert "slow/search" in above
    slow_mean = next(s.mean_duration_days for s in stats if s.project.full_name == "slow/search")
    assert summary.q3 < slow_mean <= summary.whisker_high


@given(store=sts.single_project_stores())
@settings(max_examples=100, deadline=None)
def test_appending_later_events_preserves_existing_records(store):
    project = store.projects[1]
    before = project_promotion_stats(project, store)
    latest = max(
        (e.at for e in store.project_events(1)),
        default=project.created_at,
    )
    builder = sts.builder_from_store(store)
    builder.add_event(
        999999,
        EventKind.ISSUE_COMMENT,
        project.owner.user_id,
        1,
        888888,
        latest + timedelta(days=1),
    )
    after = project_promotion_stats(project, builder.build())
    durations_before = {r.user.user_id: r.duration_days for r in before.records}
    durations_after = {r.user.user_id: r.duration_days for r in after.records}
    for uid, duration in durations_before.items():
        assert durations_after[uid] == duration
