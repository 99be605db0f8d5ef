"""Gold-span extraction and query-turn injection."""
from __future__ import annotations

from dataclasses import dataclass, replace

from .corpus import QUESTIONER, Turn
from .errors import UsageError, ValidationError


@dataclass(frozen=True)
class SpanSelection:
    instance_id: str
    turns: tuple
    query_prepended: bool = False

    def __len__(self):
        return len(self.turns)


def extract_spans(meeting, instance):
    """Turns covered by the union of the instance's inclusive spans, in meeting order."""
    if instance.meeting_id != meeting.id:
        raise ValidationError(f"instance {instance.instance_id} does not belong to meeting {meeting.id}")
    wanted = set()
    for begin, end in instance.spans:
        if not 0 <= begin <= end < len(meeting.turns):
            raise ValidationError(
                f"instance {instance.instance_id}: span ({begin}, {end}) out of bounds"
                f" for {len(meeting.turns)} turns"
            )
        wanted.update(range(begin, end + 1))
    turns = tuple(meeting.turns[i] for i in sorted(wanted))
    return SpanSelection(instance.instance_id, turns, False)


def prepend_query_turn(selection, query):
    """Put the query in front as an utterance by the fictive ``questioner``."""
    if selection.query_prepended:
        raise UsageError(f"instance {selection.instance_id}: query turn already prepended")
    # index -1 marks a turn that has no position in the source meeting
    first = Turn(-1, QUESTIONER, query)
    return replace(selection, turns=(first,) + selection.turns, query_prepended=True)
