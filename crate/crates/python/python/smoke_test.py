"""Smoke test for the mibguard extension module.

Build the module first, e.g. ``maturin develop -m crates/python/Cargo.toml``,
or copy ``target/debug/libmibguard.so`` to ``mibguard.so`` on PYTHONPATH.
"""

import json

import mibguard


def main():
    ds = mibguard.Dataset.synth(seed=3)
    assert len(ds) == 4998
    assert ds.attributes == ["iOM", "iIM", "iOU", "iIU", "iIE", "iOE"]

    ranking = mibguard.rank(ds, "relieff", seed=3)
    assert len(ranking) == 6
    assert all(-1.0 <= score <= 1.0 for _, score in ranking)

    top = [name for name, _ in mibguard.rank(ds, "infogain")[:4]]
    model = mibguard.Model.train(ds.select(top), "j48", seed=3)
    restored = mibguard.Model.from_json(model.to_json())
    row = ds.select(top).rows[0]
    assert model.predict(row) == restored.predict(row) == ds.labels[0]
    proba = model.predict_proba(row)
    assert abs(sum(proba.values()) - 1.0) < 1e-9

    report = mibguard.evaluate_cv(ds, "bayes", folds=5, seed=3)
    assert report["accuracy"] == 1.0
    json.dumps(report)

    assert mibguard.delta([2**32 - 10] * 6, [5] * 6) == [15.0] * 6

    try:
        model.predict([1.0])
    except ValueError as e:
        assert "schema mismatch" in str(e)
    else:
        raise AssertionError("wrong arity accepted")

    print("mibguard smoke test passed")


if __name__ == "__main__":
    main()
