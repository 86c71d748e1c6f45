"""Black-box conformance checks every classifier backend must pass.

Shipped as part of the package so external backends (the transformer
sidecar, or any future implementation of the wire contract) run the
identical suite the baseline is held to: fit on a fixture, predict the
fixture, probability bounds, order preservation, and empty-input handling.
The fit hyperparameters are an input; each backend supplies values sensible
for its model family.
"""

from __future__ import annotations

from foodkb.annotations.labels import NEGATIVE, POSITIVE, LabeledSRPair
from foodkb.classifier.baseline import HyperParams
from foodkb.extract.pairs import SRPair
from foodkb.extract.relations import RelationCandidate

CONTRACT_HP = HyperParams(learning_rate=0.1, batch_size=8, epochs=3)


def contract_fixture(n: int = 40) -> tuple[list[LabeledSRPair], list[SRPair]]:
    """Small separable corpus: positives mention detection, negatives absence."""
    train: list[LabeledSRPair] = []
    held_out: list[SRPair] = []
    for i in range(n):
        positive = i % 2 == 0
        food, chem = f"food{i % 5}", f"chem{i % 7}"
        if positive:
            text = f"Fixture {i}: {food} extract clearly detected {chem} compound."
        else:
            text = f"Fixture {i}: {chem} was absent from {food} tissue."
        pair = SRPair.build(f"sent{i:04d}", text, f"PMID:{i}",
                            RelationCandidate(food=food, chemical=chem))
        train.append(LabeledSRPair(pair=pair, label=POSITIVE if positive else NEGATIVE))
    for i in range(8):
        positive = i % 2 == 0
        food, chem = f"food{i % 5}", f"chem{(i + 3) % 7}"
        verb = "clearly detected" if positive else "was absent from"
        text = (f"Held-out {i}: {food} sample {verb} {chem}."
                if positive else f"Held-out {i}: {chem} {verb} {food} sample.")
        held_out.append(SRPair.build(f"held{i:04d}", text, f"PMID:h{i}",
                                     RelationCandidate(food=food, chemical=chem)))
    return train, held_out


def check_backend_contract(backend, hp: HyperParams = CONTRACT_HP,
                           seed: int = 13) -> None:
    """Raises AssertionError on any contract violation."""
    train, held_out = contract_fixture()

    model = backend.fit(train, hp, seed)

    probs = backend.predict_proba(model, held_out)
    assert len(probs) == len(held_out), "one probability per item"
    assert all(0.0 <= p <= 1.0 for p in probs), "probabilities within [0, 1]"

    # order preservation: reversing the items reverses the probabilities
    reversed_probs = backend.predict_proba(model, list(reversed(held_out)))
    assert reversed_probs == list(reversed(probs)), "order-preserving prediction"

    assert backend.predict_proba(model, []) == [], "empty item list"

    # the fixture is separable: training items must be classified correctly
    train_probs = backend.predict_proba(model, [item.pair for item in train])
    accuracy = sum(
        (p >= 0.5) == item.is_positive for p, item in zip(train_probs, train)
    ) / len(train)
    assert accuracy >= 0.95, f"training accuracy {accuracy:.3f} below 0.95"
