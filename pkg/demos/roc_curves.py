"""Walkthrough: ROC curves of the seven transfer models on one designated
learning/test split (learning size 200, repetition 0).

Writes roc_M1.csv .. roc_M7.csv and roc_all.svg into demos/output/.

Run:  python demos/roc_curves.py
"""

from pathlib import Path

from scorelink import load_german_credit, split_by_account_status
from scorelink.experiment import ExperimentConfig, emit_roc_suite

out_dir = Path(__file__).parent / "output"
source, target = split_by_account_status(load_german_credit())

curves = emit_roc_suite(
    source, target, ExperimentConfig(seed=42), learning_size=200, out_dir=out_dir
)

print("model  AUC     sweep points")
for name in sorted(curves):
    curve = curves[name]
    print(f"{name}    {curve.auc:.4f}  {curve.thresholds.size}")
print(f"\nall curves above the diagonal: {all(c.auc > 0.5 for c in curves.values())}")
print(f"files written to {out_dir}/")
