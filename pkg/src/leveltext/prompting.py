"""Few-shot exemplar selection and prompt rendering.

A training pair qualifies as an exemplar for a request when both its source
and target scores sit within the selection window (default 50 points) of the
request's; among qualifiers the shortest n by combined token length are used.
Templates live as data files with {SLOT} placeholders and are rendered
byte-reproducibly (golden fixtures under tests/golden/).
"""

import math
import warnings
from dataclasses import dataclass
from importlib import resources

from leveltext.corpus import LeveledPair
from leveltext.textproc import tokenize

DEFAULT_WINDOW = 50.0
USUAL_SHOT_COUNTS = (0, 1, 3, 5)

TASK_SIMPLIFY = "simplify it"
TASK_COMPLICATE = "complicate it"

# Prompt character count / 4: coarse, used only for context-budget warnings.
CHARS_PER_TOKEN = 4


def _template(name: str) -> str:
    return resources.files("leveltext.data.templates").joinpath(name).read_text("utf-8")


@dataclass(frozen=True)
class ShotSelectionPolicy:
    """Window and count for exemplar selection; ordering is shortest-first."""

    window: float = DEFAULT_WINDOW
    n_shots: int = 0
    ordering: str = "shortest-first"

    def __post_init__(self):
        if self.window <= 0:
            raise ValueError("window must be positive")
        if self.n_shots < 0:
            raise ValueError("n_shots must be >= 0")
        if self.n_shots not in USUAL_SHOT_COUNTS:
            warnings.warn(f"unusual shot count {self.n_shots}; expected one of {USUAL_SHOT_COUNTS}")


@dataclass(frozen=True)
class PromptBundle:
    """A rendered prompt plus enough metadata to key results downstream."""

    rendered_text: str
    shots_used: tuple[str, ...]
    task_verb: str
    estimated_tokens: int
    pair_id: str = ""
    method: str = "zero-shot"


def pair_token_length(pair: LeveledPair) -> int:
    """Combined token count of source and target texts."""
    return tokenize(pair.source_text).token_count + tokenize(pair.target_text).token_count


def qualifies(pair: LeveledPair, candidate: LeveledPair, window: float = DEFAULT_WINDOW) -> bool:
    """Both score deltas within the window, inclusive."""
    return (
        abs(candidate.source_score - pair.source_score) <= window
        and abs(candidate.target_score - pair.target_score) <= window
    )


def select_shots(
    pair: LeveledPair,
    train: list[LeveledPair],
    policy: ShotSelectionPolicy,
) -> list[LeveledPair]:
    """The n_shots qualifying train pairs with the smallest combined token
    length, ties broken by pair_id ascending.  Returns fewer (with a warning)
    when not enough pairs qualify.
    """
    if policy.n_shots == 0:
        return []
    qualifying = [
        c for c in train if c.pair_id != pair.pair_id and qualifies(pair, c, policy.window)
    ]
    qualifying.sort(key=lambda c: (pair_token_length(c), c.pair_id))
    chosen = qualifying[: policy.n_shots]
    if len(chosen) < policy.n_shots:
        warnings.warn(
            f"only {len(chosen)} of {policy.n_shots} requested shots qualify "
            f"for pair {pair.pair_id}"
        )
    return chosen


def task_verb_for(pair: LeveledPair) -> str:
    return TASK_SIMPLIFY if pair.target_score < pair.source_score else TASK_COMPLICATE


def _format_score(value: float) -> str:
    """Whole scores render without a decimal point (800, not 800.0)."""
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def _fill(template: str, mapping: dict[str, str]) -> str:
    out = template
    for slot, value in mapping.items():
        out = out.replace("{" + slot + "}", value)
    return out


def estimate_tokens(text: str) -> int:
    return math.ceil(len(text) / CHARS_PER_TOKEN)


def render_zero_shot(pair: LeveledPair) -> PromptBundle:
    """Fill the zero-shot template with the pair's texts and scores."""
    verb = task_verb_for(pair)
    rendered = _fill(
        _template("zero_shot.txt"),
        {
            "SOURCE-TEXT": pair.source_text,
            "SOURCE-LEXILE": _format_score(pair.source_score),
            "TARGET-LEXILE": _format_score(pair.target_score),
            "TASK": verb,
        },
    ).rstrip("\n")
    return PromptBundle(
        rendered_text=rendered,
        shots_used=(),
        task_verb=verb,
        estimated_tokens=estimate_tokens(rendered),
        pair_id=pair.pair_id,
        method="zero-shot",
    )


def render_few_shot(pair: LeveledPair, shots: list[LeveledPair]) -> PromptBundle:
    """Intro once, one example block per shot in order, task block once."""
    if not shots:
        raise ValueError("use zero-shot renderer")
    blocks = [_template("few_shot_intro.txt").rstrip("\n")]
    example = _template("few_shot_example.txt").rstrip("\n")
    for shot in shots:
        blocks.append(
            _fill(
                example,
                {
                    "SOURCE-TEXT": shot.source_text,
                    "SOURCE-LEXILE": _format_score(shot.source_score),
                    "TARGET-TEXT": shot.target_text,
                    "TARGET-LEXILE": _format_score(shot.target_score),
                },
            )
        )
    verb = task_verb_for(pair)
    blocks.append(
        _fill(
            _template("few_shot_task.txt").rstrip("\n"),
            {
                "SOURCE-TEXT": pair.source_text,
                "SOURCE-LEXILE": _format_score(pair.source_score),
                "TARGET-LEXILE": _format_score(pair.target_score),
                "TASK": verb,
            },
        )
    )
    rendered = "\n\n".join(blocks)
    return PromptBundle(
        rendered_text=rendered,
        shots_used=tuple(s.pair_id for s in shots),
        task_verb=verb,
        estimated_tokens=estimate_tokens(rendered),
        pair_id=pair.pair_id,
        method=f"few-shot-{len(shots)}",
    )
