"""Calibratable readability scorer on a Lexile-like 0-2000 scale.

The score is linear in log10(mean sentence length) and mean log word
frequency, the two dominant factors for upper-level readers.  Coefficients are
never hard-coded: the shipped default model is produced by :func:`calibrate`
on the bundled seed corpus (see scripts/build_seed_assets.py).
"""

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from leveltext.errors import CalibrationError, UnscorableError
from leveltext.textproc import (
    FrequencyTable,
    TokenizedText,
    mean_log_word_frequency,
    mean_sentence_length,
    tokenize,
)

DEFAULT_CLAMP = (0.0, 2000.0)


@dataclass(frozen=True)
class ScorerModel:
    """Linear scoring model: clamp(alpha*log10(msl) + beta*mlwf + gamma)."""

    alpha: float
    beta: float
    gamma: float
    clamp_min: float = DEFAULT_CLAMP[0]
    clamp_max: float = DEFAULT_CLAMP[1]
    freq_table_ref: str = ""
    fit_rmse: float | None = None
    fit_r2: float | None = None

    def __post_init__(self):
        if not self.clamp_min < self.clamp_max:
            raise ValueError("clamp range must satisfy min < max")

    def save(self, path: str | Path) -> None:
        lines = [
            f"alpha={self.alpha!r}",
            f"beta={self.beta!r}",
            f"gamma={self.gamma!r}",
            f"clamp_min={self.clamp_min!r}",
            f"clamp_max={self.clamp_max!r}",
            f"freq_table={self.freq_table_ref}",
            f"fit_rmse={'' if self.fit_rmse is None else repr(self.fit_rmse)}",
            f"fit_r2={'' if self.fit_r2 is None else repr(self.fit_r2)}",
        ]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "ScorerModel":
        fields: dict[str, str] = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            fields[key.strip()] = value.strip()
        return cls(
            alpha=float(fields["alpha"]),
            beta=float(fields["beta"]),
            gamma=float(fields["gamma"]),
            clamp_min=float(fields.get("clamp_min", DEFAULT_CLAMP[0])),
            clamp_max=float(fields.get("clamp_max", DEFAULT_CLAMP[1])),
            freq_table_ref=fields.get("freq_table", ""),
            fit_rmse=float(fields["fit_rmse"]) if fields.get("fit_rmse") else None,
            fit_r2=float(fields["fit_r2"]) if fields.get("fit_r2") else None,
        )


@dataclass(frozen=True)
class ReadabilityReport:
    """Score plus the explanatory features it was computed from."""

    score: float
    msl: float
    mlwf: float
    token_count: int
    sentence_count: int

    def to_dict(self) -> dict:
        return {
            "score": self.score,
            "msl": self.msl,
            "mlwf": self.mlwf,
            "token_count": self.token_count,
            "sentence_count": self.sentence_count,
        }


def score_tokenized(t: TokenizedText, model: ScorerModel, freq: FrequencyTable) -> ReadabilityReport:
    """Score an already-tokenized text; raises UnscorableError on empty input."""
    if t.sentence_count == 0 or t.token_count == 0:
        raise UnscorableError("unscorable: empty")
    msl = mean_sentence_length(t)
    mlwf = mean_log_word_frequency(t, freq)
    if msl <= 0 or not math.isfinite(mlwf):
        raise UnscorableError("unscorable: degenerate features")
    raw = model.alpha * math.log10(msl) + model.beta * mlwf + model.gamma
    value = min(max(raw, model.clamp_min), model.clamp_max)
    return ReadabilityReport(value, msl, mlwf, t.token_count, t.sentence_count)


def score(text: str, model: ScorerModel, freq: FrequencyTable) -> ReadabilityReport:
    """Score a raw string; deterministic for a fixed model and table."""
    return score_tokenized(tokenize(text), model, freq)


def calibrate(
    labeled: list[tuple[str, float]],
    freq: FrequencyTable,
    clamp: tuple[float, float] = DEFAULT_CLAMP,
    freq_table_ref: str = "",
) -> ScorerModel:
    """Least-squares fit of reference scores on [log10(msl), mlwf, 1].

    Needs at least 3 scorable documents with non-degenerate feature variation;
    a rank-deficient design matrix raises CalibrationError.
    """
    if len(labeled) < 3:
        raise CalibrationError("degenerate calibration set: need at least 3 documents")
    rows = []
    targets = []
    for text, ref in labeled:
        t = tokenize(text)
        if t.sentence_count == 0 or t.token_count == 0:
            raise UnscorableError("unscorable: empty document in calibration set")
        rows.append([math.log10(mean_sentence_length(t)), mean_log_word_frequency(t, freq), 1.0])
        targets.append(float(ref))
    design = np.array(rows, dtype=float)
    y = np.array(targets, dtype=float)
    if np.linalg.matrix_rank(design) < 3:
        raise CalibrationError("degenerate calibration set")
    coef, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    fitted = design @ coef
    residuals = y - fitted
    rmse = float(np.sqrt(np.mean(residuals**2)))
    ss_res = float(np.sum(residuals**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return ScorerModel(
        alpha=float(coef[0]),
        beta=float(coef[1]),
        gamma=float(coef[2]),
        clamp_min=clamp[0],
        clamp_max=clamp[1],
        freq_table_ref=freq_table_ref,
        fit_rmse=rmse,
        fit_r2=r2,
    )
