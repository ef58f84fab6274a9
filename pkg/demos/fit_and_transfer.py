"""Walkthrough: fit a scorecard on bank customers, transfer it to
non-customers through each of the seven link models.

Run:  python demos/fit_and_transfer.py
"""

import numpy as np

from scorelink import (
    LinkModelKind,
    estimate_transition,
    fit_m7,
    fit_mle,
    load_german_credit,
    score,
    split_by_account_status,
)
from scorelink.dataset import SplitPlan, draw_split

full = load_german_credit()
print(f"German credit data: {full.n_records} applicants, {full.dimension} variables, "
      f"{full.class_counts()[1]} creditworthy")

source, target = split_by_account_status(full)
print(f"customers (source):     {source.n_records:4d} rows, "
      f"{source.labels.mean():.1%} creditworthy")
print(f"non-customers (target): {target.n_records:4d} rows, "
      f"{target.labels.mean():.1%} creditworthy")

source_fit = fit_mle(source)
print(f"\nsource fit: converged in {source_fit.iterations} Newton steps, "
      f"log-likelihood {source_fit.log_likelihood:.2f}")
print(f"intercept {source_fit.params.intercept:+.4f}; "
      f"largest |coefficient| {np.max(np.abs(source_fit.params.coefficients)):.4f}")

# one learning/test split of the small subpopulation
learning, test = draw_split(target, SplitPlan(learning_size=200, seed=42), 0)
print(f"\nlearning sample: {learning.n_records} rows; test sample: {test.n_records} rows")

print("\nmodel  free params  shift c    scale summary            learning LL")
for kind in LinkModelKind:
    if kind is LinkModelKind.M7:
        fit = fit_m7(source, learning)
        c_text, scale_text = "   --  ", "pooled refit"
    else:
        fit = estimate_transition(kind, source_fit.params, learning)
        scale = fit.transition.scale
        c_text = f"{fit.transition.shift:+.4f}"
        if np.all(scale == scale[0]):
            scale_text = f"lambda = {scale[0]:.4f}"
        else:
            scale_text = f"diag in [{scale.min():.3f}, {scale.max():.3f}]"
    d = source_fit.params.dimension
    print(f"{kind.value}     {kind.free_parameter_count(d):3d}       {c_text}    "
          f"{scale_text:24s} {fit.log_likelihood:10.3f}")

    accept_rate = float(np.mean(score(fit.target_params, test.features) >= 0.5))
    print(f"       -> would accept {accept_rate:.1%} of the test applicants")
