import pytest

from emgsim import ModelParams
from emgsim.params import CONFIG_KEYS, coerce_value, sweepable_keys, validate_field


class TestDomains:
    @pytest.mark.parametrize("field,bad", [
        ("n_agents", 1),
        ("n_agents", 0),
        ("memory", 0),
        ("mutation_width", 0.0),
        ("mutation_width", 1.2),
        ("beta", -0.01),
        ("beta", 1.01),
        ("gamma_a", -1.0),
        ("gamma_b", -0.5),
        ("t_relax", -1),
        ("t_meas", 0),
        ("n_runs", 0),
        ("master_seed", -1),
        ("p_init_b", 1.5),
        ("predictor", "guess"),
    ])
    def test_bad_values_rejected(self, field, bad):
        with pytest.raises(ValueError):
            ModelParams(**{field: bad})

    def test_boundary_values_accepted(self):
        ModelParams(beta=0.0)
        ModelParams(beta=1.0)
        ModelParams(mutation_width=1.0)
        ModelParams(gamma_b=0.0)
        ModelParams(t_relax=0)
        ModelParams(p_init_b=0.0)
        ModelParams(p_init_b=1.0)

    def test_int_fields_reject_floats(self):
        with pytest.raises(ValueError):
            ModelParams(n_agents=100.5)
        with pytest.raises(ValueError):
            validate_field("t_meas", 2.0)

    def test_params_are_frozen_and_hashable(self):
        p = ModelParams()
        with pytest.raises(AttributeError):
            p.beta = 0.5
        assert p in {p}


class TestKeyMapping:
    def test_every_key_maps_to_a_field(self):
        names = {f for f in ModelParams.__dataclass_fields__}
        assert set(CONFIG_KEYS.values()) == names

    def test_sweepable_excludes_predictor(self):
        keys = sweepable_keys()
        assert "predictor" not in keys
        assert "beta" in keys and "gamma_B" in keys and "N" in keys

    def test_coerce_int_fields(self):
        assert coerce_value("n_agents", "1e3") == 1000
        assert isinstance(coerce_value("n_agents", "1e3"), int)
        with pytest.raises(ValueError):
            coerce_value("n_agents", "10.5")

    def test_coerce_float_fields(self):
        assert coerce_value("exit_threshold", "-2e7") == -2e7

    def test_coerce_rejects_garbage(self):
        with pytest.raises(ValueError):
            coerce_value("beta", "high")
