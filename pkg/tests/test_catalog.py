import json

import numpy as np
import pytest

from heathsym import expr as ex
from heathsym.catalog import (
    InadmissibleParamsError,
    UnknownEntryError,
    export_json,
    get_spec,
    instantiate,
    list_entries,
    match_fhat,
    verify_commutators,
    verify_entry,
)


def test_catalog_has_22_entries():
    entries = list_entries()
    assert len(entries) == 22
    dims = sorted({e["dimension"] for e in entries})
    assert dims == [1, 2, 3, 4]


def test_every_entry_passes_at_defaults():
    for meta in list_entries():
        spec = get_spec(meta["id"])
        variants = spec.variant_names() if spec.sign_variants else ("plus",)
        for var in variants:
            rep = verify_entry(meta["id"], sign_variant=var, n=60, seed=0)
            assert rep.passed, (meta["id"], var, rep.max_abs)
            assert rep.max_abs < 1e-8


def test_random_admissible_draws_pass():
    rng = np.random.default_rng(11)
    for meta in list_entries():
        spec = get_spec(meta["id"])
        if not spec.params:
            continue
        params = spec.sample_params(rng)
        rep = verify_entry(meta["id"], params=params, n=50, seed=5)
        assert rep.passed, (meta["id"], params, rep.max_abs)


def test_unknown_entry():
    with pytest.raises(UnknownEntryError):
        get_spec("A_9_9")
    with pytest.raises(UnknownEntryError):
        verify_entry("A_9_9")


def test_inadmissible_params_named():
    with pytest.raises(InadmissibleParamsError) as ei:
        instantiate("A_3_5_2", params={"A": 1.0, "B": 0.0})
    assert "B" in str(ei.value)
    with pytest.raises(InadmissibleParamsError):
        instantiate("A_4_4", params={"A": 0.0, "B": 1.0})


def test_sign_variants_differ():
    plus = instantiate("A_3_5_2", sign_variant="plus")
    minus = instantiate("A_3_5_2", sign_variant="minus")
    env = {"x": 0.9, "u": 1.1}
    assert abs(ex.evaluate(plus.fhat, env) - ex.evaluate(minus.fhat, env)) > 1e-6


def test_arbitrary_function_slot():
    # the 2d algebra with a free profile of its invariant: swap in a
    # different profile and the generators still pass
    rep = verify_entry("A_2_2_1", functions={"F_psi": "s^3 + sin(s)"}, n=50, seed=2)
    assert rep.passed, rep.max_abs


def test_function_slot_rejects_wrong_symbol():
    with pytest.raises(ValueError):
        instantiate("A_2_2_1", functions={"F_psi": "s + x"})


def test_commutator_closure_representatives():
    for entry_id in ("A_4_4", "A_2_2_2", "A_3_5_9"):
        reports = verify_commutators(entry_id, n=40, seed=1, tolerance=1e-6)
        assert reports, entry_id
        for (i, j, rep) in reports:
            assert rep.passed, (entry_id, i, j, rep.max_abs)


def test_match_fhat_finds_quadratic_family():
    # phi^2 * e^{3x} plus the matching x-profile belongs to the
    # quadratic-source family at B = 3
    fhat = "-exp(3*x)*phi^2 - (81/4)*exp(-3*x)"
    matches = match_fhat(fhat, n=40, seed=0, tolerance=1e-6)
    ids = [m["id"] for m in matches]
    assert "A_3_5_9" in ids
    m = next(m for m in matches if m["id"] == "A_3_5_9")
    assert abs(m["params"]["B"] - 3.0) < 1e-6


def test_match_fhat_rejects_generic_source():
    # a generic source admits only the one-dimensional translation algebra
    matches = match_fhat("phi^2 + sin(x)*phi^3", n=30, seed=0, tolerance=1e-6)
    assert [m["id"] for m in matches] == ["A_1"]


def test_export_json_round_trips():
    data = json.loads(export_json())
    assert len(data) == 22
    ids = {e["id"] for e in data}
    assert "A_1" in ids and "A_4_4" in ids
    assert all("generators" in e and "constraints" in e for e in data)
