import pytest

from evosim.character import PreferenceSet
from evosim.lmclient import LmClient, PromptKind, ScriptedBackend
from evosim.personality import (EMOTION_LABELS, EmotionState, InsightRecord,
                                LongTermRecord, ShortTermRecord,
                                check_replan_trigger, decay_memories,
                                filter_memories, generate_insight,
                                grow_character, update_emotion)
from test_character import make_structure


def emotion(category, day=1, tick=0):
    return EmotionState(category=category, feeling="f", day=day, tick=tick)


class TestEmotion:
    def test_seven_labelled_categories(self):
        assert sorted(EMOTION_LABELS) == [1, 2, 3, 4, 5, 6, 7]
        assert EMOTION_LABELS[1] == "Despairing"
        assert EMOTION_LABELS[7] == "Excited"

    def test_update_produces_valid_state(self, client):
        state = update_emotion("ana", "a quiet walk", make_structure(), None,
                               client, day=1, tick=3)
        assert 1 <= state.category <= 7
        assert state.feeling.startswith("I feel")
        assert (state.day, state.tick) == (1, 3)

    def test_negative_actions_skew_negative(self, client):
        # [DERIVED] the scripted lexicon counts valence hits; stacking
        # negative words must never yield a happier category than stacking
        # positive ones for the same hash noise band.
        neg = update_emotion("ana", "fear doubt failure pressure stress", make_structure(),
                             None, client, 1, 0)
        pos = update_emotion("ana", "exciting creative breakthrough progress success",
                             make_structure(), None, client, 1, 0)
        assert neg.category < pos.category

    def test_feelings_ablated_suppresses_text(self, client):
        state = update_emotion("ana", "a walk", make_structure(), None, client, 1, 0,
                               feelings_enabled=False)
        assert state.feeling == "-"
        assert 1 <= state.category <= 7

    def test_replan_trigger_threshold(self):
        assert not check_replan_trigger(None, emotion(7))
        assert not check_replan_trigger(emotion(4), emotion(6))
        assert check_replan_trigger(emotion(7), emotion(4))  # excitement -> calm
        assert check_replan_trigger(emotion(2), emotion(5))
        assert not check_replan_trigger(emotion(4), emotion(4))


class TestMemory:
    def _records(self, n, text="went jogging alone"):
        return [ShortTermRecord(day=1, tick=i, action=f"{text} #{i}", emotion=emotion(4))
                for i in range(n)]

    def test_empty_day_keeps_nothing(self, client):
        assert filter_memories("ana", [], make_structure(), client, 1) == []

    def test_filter_keeps_resonant_subset(self, client):
        records = self._records(6)
        kept = filter_memories("ana", records, make_structure(), client, 1)
        assert 1 <= len(kept) <= len(records)
        for r in kept:
            assert r.day == 1
            assert r.summary
            assert not r.blurred

    def test_decay_below_capacity_is_identity(self, client):
        store = [LongTermRecord(day=d, summary=f"s{d}", salience="traits")
                 for d in range(10)]
        assert decay_memories(store, client, "ana", 11, capacity=30) == store

    def test_decay_condenses_oldest_batch(self, client):
        store = [LongTermRecord(day=d, summary=f"memory {d}", salience="traits")
                 for d in range(35)]
        out = decay_memories(store, client, "ana", 36, capacity=30, blur_batch=10)
        # 35 -> blur first 10 into 1 -> 26 <= 30.
        assert len(out) == 26
        assert out[0].blurred and out[0].day_span == (0, 9)
        # Chronological tail is untouched.
        assert [r.summary for r in out[1:]] == [f"memory {d}" for d in range(10, 35)]

    def test_decay_repeats_until_capacity(self, client):
        store = [LongTermRecord(day=d, summary=f"m{d}", salience="traits")
                 for d in range(55)]
        out = decay_memories(store, client, "ana", 56, capacity=30, blur_batch=10)
        # 55 -> 46 -> 37 -> 28: three condensations, each absorbing the
        # previous blurred record into the new one.
        assert len(out) == 28
        assert out[0].blurred
        assert not any(r.blurred for r in out[1:])


class TestInsight:
    def test_insight_references_day(self, client):
        insight = generate_insight("ana", ["worked", "talked"], [], make_structure(),
                                   client, day=4)
        assert insight.day == 4
        assert insight.reflection.startswith("Reflecting on today")

    def test_different_days_can_differ(self, client):
        outs = {generate_insight("ana", [f"event {i}"], [], make_structure(), client, 1).reflection
                for i in range(6)}
        assert len(outs) > 1


class TestGrowth:
    def test_grow_bumps_revision_and_validates(self, client):
        cs = make_structure()
        grown, delta = grow_character("ana", InsightRecord(day=1, reflection="r"),
                                      "a full day", cs, client, 1)
        assert grown.revision == 1
        assert grown.basic_info == cs.basic_info
        assert (delta.old_revision, delta.new_revision) == (0, 1)
        assert delta.state_diff != "unchanged"

    def test_growth_is_sequential_not_parallel(self):
        # Each stage must see the previous stage's partial structure: the
        # transcript of structures sent per stage should evolve.
        seen = []
        client = LmClient(backend=ScriptedBackend(7),
                          log_hook=lambda r, resp: seen.append(r))
        grow_character("ana", InsightRecord(day=1, reflection="r"), "day",
                       make_structure(), client, 1)
        kinds = [r.kind for r in seen]
        assert kinds == [PromptKind.GROWTH_STATE, PromptKind.GROWTH_FEATURE,
                         PromptKind.GROWTH_CONFLICT, PromptKind.GROWTH_PREFERENCE]
        structures = [r.context["structure"] for r in seen]
        assert structures[0] != structures[1]  # state update visible to stage 2
        assert structures[1] != structures[2]
        assert structures[2] != structures[3]

    def test_growth_preserves_goal_consistency(self, client):
        cs = make_structure()
        grown, _ = grow_character("ana", InsightRecord(day=1, reflection="r"),
                                  "day", cs, client, 1)
        pref = grown.preference
        assert pref.ultimate_goal in pref.short_term_goal
        assert pref.ultimate_goal in pref.long_term_goal

    def test_atomicity_on_stage_failure(self, client, monkeypatch):
        # A failing late stage must leave the original structure in force,
        # i.e. grow_character raises without returning a half-updated one.
        cs = make_structure()
        calls = []
        original = client.backend.complete

        def flaky(req):
            calls.append(req.kind)
            if req.kind is PromptKind.GROWTH_PREFERENCE:
                raise RuntimeError("backend down")
            return original(req)

        monkeypatch.setattr(client.backend, "complete", flaky)
        with pytest.raises(RuntimeError):
            grow_character("ana", InsightRecord(day=1, reflection="r"), "day",
                           cs, client, 1)
        assert cs == make_structure()  # untouched


class TestSerialization:
    def test_round_trips(self):
        st = ShortTermRecord(day=1, tick=2, action="a", emotion=emotion(5))
        assert ShortTermRecord.from_dict(st.to_dict()) == st
        lt = LongTermRecord(day=1, summary="s", salience="traits",
                            blurred=True, day_span=(1, 3))
        assert LongTermRecord.from_dict(lt.to_dict()) == lt
        es = emotion(3, day=2, tick=9)
        assert EmotionState.from_dict(es.to_dict()) == es
