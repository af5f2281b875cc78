import pytest

from litgraph.concepts import (
    ConceptSet,
    build_concept_prompt,
    generate_concepts,
    load_concepts,
    parse_numbered_list,
    save_concepts,
)
from litgraph.corpus import PaperRecord
from litgraph.errors import ConceptParseError, GenerationError

RECORD = PaperRecord(
    "quasi",
    "A quasi classical approach to electron impact ionization",
    "A quasi classical approximation to quantum mechanical scattering is developed.",
)

# Completions shaped like the three-level annotations the prompts ask for.
LEVEL_COMPLETIONS = {
    1: "1. Physics\n2. Mathematics\n3. Chemistry",
    2: "1. Quantum Mechanics\n2. Theoretical Physics\n3. Atomic Physics",
    3: "1. Quantum Scattering Theory\n2. Classical Trajectory Methods\n3. Atomic Collision Dynamics",
}


class SequencedClient:
    """Returns level completions keyed on which prompt text arrives."""

    def __init__(self, fail_first=0):
        self.fail_first = fail_first
        self.calls = 0

    def complete(self, prompt, max_new_tokens=None):
        self.calls += 1
        if self.calls <= self.fail_first:
            raise ConnectionError("endpoint down")
        if "maximum three words" in prompt:
            return LEVEL_COMPLETIONS[3]
        if "Avoid sub-disciplines" in prompt:
            return LEVEL_COMPLETIONS[1]
        return LEVEL_COMPLETIONS[2]


class TestPrompts:
    def test_level1_wording(self):
        prompt = build_concept_prompt(RECORD, 1)
        assert "three major academic disciplines" in prompt
        assert RECORD.title in prompt
        assert RECORD.abstract in prompt

    def test_level2_wording(self):
        assert "three major scientific fields" in build_concept_prompt(RECORD, 2)

    def test_level3_wording(self):
        assert "maximum three words" in build_concept_prompt(RECORD, 3)

    def test_numbered_list_requested_at_every_level(self):
        for level in (1, 2, 3):
            assert "simple numbered list" in build_concept_prompt(RECORD, level)

    def test_empty_abstract_still_well_formed(self):
        rec = PaperRecord("x", "Title only", "")
        prompt = build_concept_prompt(rec, 1)
        assert prompt.endswith("Title only")

    def test_bad_level_rejected(self):
        with pytest.raises(ValueError):
            build_concept_prompt(RECORD, 4)


class TestParseNumberedList:
    def test_basic(self):
        out = parse_numbered_list("1. Physics\n2. Mathematics\n3. Chemistry")
        assert out == ["Physics", "Mathematics", "Chemistry"]

    def test_paren_prefix_and_extras_dropped(self):
        assert parse_numbered_list("1) A\n 2) B\n3) C\n4) D") == ["A", "B", "C"]

    def test_no_list_errors(self):
        with pytest.raises(ConceptParseError) as exc:
            parse_numbered_list("no list here")
        assert exc.value.completion == "no list here"

    def test_two_items_errors(self):
        with pytest.raises(ConceptParseError):
            parse_numbered_list("1. A\n2. B")

    def test_trailing_periods_trimmed(self):
        out = parse_numbered_list("1. Physics.\n2. Math.\n3. Chem.")
        assert out == ["Physics", "Math", "Chem"]

    def test_preamble_lines_ignored(self):
        text = "Here are the disciplines:\n1. A\n2. B\n3. C"
        assert parse_numbered_list(text) == ["A", "B", "C"]


class TestGenerateConcepts:
    def test_levels_parsed(self):
        cset = generate_concepts(RECORD, SequencedClient(), sleep=lambda s: None)
        assert cset.level(2) == ["Quantum Mechanics", "Theoretical Physics", "Atomic Physics"]
        assert len(cset.all_labels()) == 9

    def test_deterministic_for_fixed_client(self):
        a = generate_concepts(RECORD, SequencedClient(), sleep=lambda s: None)
        b = generate_concepts(RECORD, SequencedClient(), sleep=lambda s: None)
        assert a == b

    def test_retry_then_success(self):
        client = SequencedClient(fail_first=1)
        slept = []
        cset = generate_concepts(RECORD, client, sleep=slept.append)
        assert cset.level(1) == ["Physics", "Mathematics", "Chemistry"]
        assert slept == [1.0]

    def test_exhausted_retries_raise_generation_error(self):
        client = SequencedClient(fail_first=100)
        with pytest.raises(GenerationError):
            generate_concepts(RECORD, client, sleep=lambda s: None)
        assert client.calls == 3

    def test_parse_error_tagged_with_level(self):
        class Garbage:
            def complete(self, prompt, max_new_tokens=None):
                return "nothing numbered"

        with pytest.raises(ConceptParseError) as exc:
            generate_concepts(RECORD, Garbage(), sleep=lambda s: None)
        assert "level 1" in str(exc.value)


class TestConceptSetShape:
    def test_requires_three_by_three(self):
        with pytest.raises(ValueError):
            ConceptSet("x", [["a", "b"], ["c", "d", "e"], ["f", "g", "h"]])

    def test_rejects_empty_label(self):
        with pytest.raises(ValueError):
            ConceptSet("x", [["a", "b", " "], ["c", "d", "e"], ["f", "g", "h"]])


class TestConceptsFile:
    def test_round_trip(self, tmp_path):
        cset = ConceptSet("p1", [["A", "B", "C"], ["D", "E", "F"], ["G", "H", "I"]])
        save_concepts({"p1": cset}, tmp_path / "concepts.jsonl")
        loaded = load_concepts(tmp_path / "concepts.jsonl")
        assert loaded == {"p1": cset}

    def test_incomplete_paper_skipped(self, tmp_path, caplog):
        path = tmp_path / "concepts.jsonl"
        path.write_text(
            '{"paper_id":"p1","level":1,"labels":["A","B","C"]}\n'
            '{"paper_id":"p1","level":2,"labels":["D","E","F"]}\n'
        )
        with caplog.at_level("WARNING"):
            loaded = load_concepts(path)
        assert loaded == {}

    def test_corrupt_row_skipped(self, tmp_path, caplog):
        path = tmp_path / "concepts.jsonl"
        path.write_text(
            "{bad json\n"
            '{"paper_id":"p1","level":1,"labels":["A","B","C"]}\n'
            '{"paper_id":"p1","level":2,"labels":["D","E","F"]}\n'
            '{"paper_id":"p1","level":3,"labels":["G","H","I"]}\n'
        )
        with caplog.at_level("WARNING"):
            loaded = load_concepts(path)
        assert set(loaded) == {"p1"}
