"""Parametric links transferring a source score function to the target.

Seven nested strategies tie the target score function (intercept b0*,
coefficients b*) to the source fit (b0, b) through a shift c and a
diagonal scaling L:

    b0* = b0 + c,    b*_j = L_j * b_j.

========  ======================  =========================
model     free parameters         constraint pattern
========  ======================  =========================
M1        none                    c = 0, L = I
M2        1 (lambda)              c = 0, L = lambda * I
M3        1 (c)                   L = I
M4        2 (c, lambda)           L = lambda * I
M5        d (diagonal L)          c = 0
M6        d + 1 (c, diagonal L)   none
M7        d + 1 (refit)           pooled source + learning
========  ======================  =========================

M1..M6 maximize the learning-sample likelihood over exactly their free
parameters, holding the source fit fixed; estimation runs on the
reparameterized design (columns ``b_j * x_j``) so the free parameters
enter as ordinary logistic coefficients. M7 ignores the link structure
and refits on the pooled rows. All optimizations warm-start at the
identity link and share the Newton contract of
:func:`scorelink.logistic.fit_mle`, with the ridge applied to deviations
from the identity: c^2, (lambda - 1)^2, sum_j (L_j - 1)^2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dataset import POOLED_TAG, LabeledSample
from .exceptions import NumericalError
from .logistic import (
    FitConfig,
    LogisticParams,
    fit_mle,
    log_likelihood,
    maximize_logistic,
    score,
)

# below this magnitude a source coefficient makes its scale unidentifiable
IDENTIFIABILITY_EPS = 1e-10


class LinkModelKind(Enum):
    M1 = "M1"
    M2 = "M2"
    M3 = "M3"
    M4 = "M4"
    M5 = "M5"
    M6 = "M6"
    M7 = "M7"

    def free_parameter_count(self, dimension: int) -> int:
        """Number of parameters the estimator optimizes for this kind."""
        return {
            LinkModelKind.M1: 0,
            LinkModelKind.M2: 1,
            LinkModelKind.M3: 1,
            LinkModelKind.M4: 2,
            LinkModelKind.M5: dimension,
            LinkModelKind.M6: dimension + 1,
            LinkModelKind.M7: dimension + 1,
        }[self]


@dataclass(frozen=True)
class TransitionParams:
    """Shift c and diagonal scaling of the source-to-target link."""

    shift: float
    scale: np.ndarray

    def __post_init__(self):
        scale = np.asarray(self.scale, dtype=float)
        if scale.ndim != 1:
            raise ValueError("scale must be a 1-d vector")
        if not (np.isfinite(self.shift) and np.all(np.isfinite(scale))):
            raise ValueError("transition parameters must be finite")
        scale.setflags(write=False)
        object.__setattr__(self, "shift", float(self.shift))
        object.__setattr__(self, "scale", scale)

    @classmethod
    def identity(cls, dimension: int) -> "TransitionParams":
        return cls(0.0, np.ones(dimension))


@dataclass(frozen=True)
class TransferFit:
    """A fitted target score function and how it was obtained.

    ``log_likelihood`` is always evaluated on the target learning sample
    (unpenalized), also for M1 and M7 whose estimation does not maximize
    it. ``unidentifiable`` lists coefficient indices whose scale was
    pinned to 1 because the source coefficient is numerically zero.
    """

    kind: LinkModelKind
    transition: TransitionParams | None
    target_params: LogisticParams
    log_likelihood: float
    converged: bool
    unidentifiable: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        out = {"model": self.kind.value}
        if self.transition is not None:
            out["c"] = self.transition.shift
            out["lambda"] = self.transition.scale.tolist()
        out.update(self.target_params.to_dict())
        out["log_likelihood"] = self.log_likelihood
        out["converged"] = self.converged
        if self.unidentifiable:
            out["unidentifiable"] = list(self.unidentifiable)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "TransferFit":
        kind = LinkModelKind(data["model"])
        transition = None
        if "c" in data:
            transition = TransitionParams(data["c"], np.asarray(data["lambda"], dtype=float))
        return cls(
            kind=kind,
            transition=transition,
            target_params=LogisticParams.from_dict(data),
            log_likelihood=float(data["log_likelihood"]),
            converged=bool(data["converged"]),
            unidentifiable=tuple(data.get("unidentifiable", ())),
        )


def compose(source: LogisticParams, transition: TransitionParams) -> LogisticParams:
    """Apply the link: intercept + shift, coefficients scaled component-wise."""
    if transition.scale.shape[0] != source.dimension:
        raise ValueError(
            f"scale length {transition.scale.shape[0]} does not match "
            f"{source.dimension} coefficients"
        )
    return LogisticParams(
        source.intercept + transition.shift, transition.scale * source.coefficients
    )


def _single_class_guard(learning: LabeledSample, config: FitConfig) -> None:
    zeros, ones = learning.class_counts()
    if (zeros == 0 or ones == 0) and config.ridge == 0.0:
        raise NumericalError(
            "degenerate labels: learning sample contains a single class and ridge = 0"
        )


def estimate_transition(
    kind: LinkModelKind,
    source: LogisticParams,
    learning: LabeledSample,
    config: FitConfig = FitConfig(),
) -> TransferFit:
    """Estimate the transition parameters of one link model (M1..M6).

    M1 performs no optimization and ignores the learning sample's content;
    the other kinds run Newton over their free parameters, warm-started at
    the identity link. Non-convergence is reported through the flag, never
    raised.
    """
    if kind is LinkModelKind.M7:
        raise ValueError("M7 is a pooled refit; use fit_m7")
    d = source.dimension
    if learning.dimension != d:
        raise ValueError(
            f"learning sample dimension {learning.dimension} does not match "
            f"{d} source coefficients"
        )

    if kind is LinkModelKind.M1:
        transition = TransitionParams.identity(d)
        target = compose(source, transition)
        return TransferFit(
            kind=kind,
            transition=transition,
            target_params=target,
            log_likelihood=log_likelihood(target, learning),
            converged=True,
        )

    _single_class_guard(learning, config)

    scaled = learning.features * source.coefficients  # columns b_j * x_j
    summed = scaled.sum(axis=1)  # b @ x per row
    ones_col = np.ones(learning.n_records)
    free = np.abs(source.coefficients) > IDENTIFIABILITY_EPS
    pinned = tuple(int(j) for j in np.flatnonzero(~free))

    offset = np.full(learning.n_records, source.intercept)
    if kind is LinkModelKind.M2:
        design, center = summed[:, None], np.array([1.0])
    elif kind is LinkModelKind.M3:
        design, center = ones_col[:, None], np.array([0.0])
        offset += summed  # the whole source score is fixed; only c moves
    elif kind is LinkModelKind.M4:
        design = np.column_stack([ones_col, summed])
        center = np.array([0.0, 1.0])
    elif kind is LinkModelKind.M5:
        design = scaled[:, free]
        center = np.ones(design.shape[1])
        offset += scaled[:, ~free].sum(axis=1)  # pinned scales stay at 1
    elif kind is LinkModelKind.M6:
        design = np.column_stack([ones_col, scaled[:, free]])
        center = np.concatenate(([0.0], np.ones(design.shape[1] - 1)))
        offset += scaled[:, ~free].sum(axis=1)
    else:  # pragma: no cover
        raise ValueError(f"unknown link model {kind}")

    result = maximize_logistic(
        design,
        learning.labels,
        offset=offset,
        penalty=np.full(design.shape[1], config.ridge),
        center=center,
        start=center,
        max_iterations=config.max_iterations,
        gradient_tolerance=config.gradient_tolerance,
    )

    if kind is LinkModelKind.M2:
        transition = TransitionParams(0.0, np.full(d, result.x[0]))
    elif kind is LinkModelKind.M3:
        transition = TransitionParams(result.x[0], np.ones(d))
    elif kind is LinkModelKind.M4:
        transition = TransitionParams(result.x[0], np.full(d, result.x[1]))
    else:
        scale = np.ones(d)
        if kind is LinkModelKind.M5:
            scale[free] = result.x
            shift = 0.0
        else:
            scale[free] = result.x[1:]
            shift = result.x[0]
        transition = TransitionParams(shift, scale)

    target = compose(source, transition)
    return TransferFit(
        kind=kind,
        transition=transition,
        target_params=target,
        log_likelihood=log_likelihood(target, learning),
        converged=result.converged,
        unidentifiable=pinned if kind in (LinkModelKind.M5, LinkModelKind.M6) else (),
    )


def fit_m7(
    source_sample: LabeledSample,
    learning: LabeledSample,
    config: FitConfig = FitConfig(),
) -> TransferFit:
    """Refit from scratch on all source rows pooled with the learning rows."""
    if source_sample.dimension != learning.dimension:
        raise ValueError(
            f"source dimension {source_sample.dimension} does not match "
            f"learning dimension {learning.dimension}"
        )
    pooled = LabeledSample(
        np.vstack([source_sample.features, learning.features]),
        np.concatenate([source_sample.labels, learning.labels]),
        learning.feature_names,
        POOLED_TAG,
    )
    report = fit_mle(pooled, config)
    return TransferFit(
        kind=LinkModelKind.M7,
        transition=None,
        target_params=report.params,
        log_likelihood=log_likelihood(report.params, learning),
        converged=report.converged,
    )


def score_target(fit: TransferFit, x) -> np.ndarray | float:
    """Posterior probability of label 1 under the transferred score function."""
    return score(fit.target_params, x)
