"""Run the condition chain on a scaling model and on a model without scaling.

The Cauchy-type model satisfies every item with h/K = 2. The log-slow profile
decays too slowly for any power-law scaling: all items fail on the same window.
"""
from levyhk.harness import verify_equivalence_chain
from levyhk.model import LevyModel, builtin_model
from levyhk.profiles import make_profile

for model, T in ((LevyModel(make_profile("log-slow", 1), name="log-slow"), 1.0), (builtin_model("cauchy"), float("inf"))):
    rep = verify_equivalence_chain(model, T=T)
    print(f"{rep.model_id} (T = {T}): {rep.joint}, consistent = {rep.consistent}")
    for k, item in rep.items.items():
        print(f"  ({k}) {item.verdict:<6} witness {item.witness:.6g}")
