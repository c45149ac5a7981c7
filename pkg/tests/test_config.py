import json
from dataclasses import replace

import jsonschema
import pytest

from jrchybrid.channel import ChannelConfig
from jrchybrid.cli import config_schema
from jrchybrid.config import (
    PAPER, chain_count_fallbacks, default_system, system_from_dict, system_to_dict, validate,
)


def test_defaults_valid():
    s = default_system()
    assert validate(s, [0.2, 0.4, 1.0]) == []
    assert (s.channel.n_tx, s.channel.n_rx, s.channel.n_streams, s.channel.n_paths) == (120, 6, 6, 10)
    assert s.power.p_rf == pytest.approx(0.512)
    assert PAPER.trials == 1000 and PAPER.target_angles_deg == (-30.0, 0.0, 30.0)


def test_rho_out_of_range():
    assert "rho out of [0,1]: 1.5" in validate(default_system(), [1.5])


def test_indivisible_n_tx_suggests_nearest():
    s = replace(default_system(), channel=ChannelConfig(n_tx=121))
    v = validate(s)
    assert any("nearest valid n_tx is 120" in x for x in v)


def test_collects_all_violations():
    s = default_system()
    s = replace(s, channel=ChannelConfig(n_tx=121, n_rx=2, n_streams=6), power=replace(s.power, p_c=-1))
    v = validate(s, [2.0])
    assert len(v) >= 4


def test_validate_idempotent_and_pure():
    s = default_system()
    before = system_to_dict(s)
    assert validate(s) == validate(s)
    assert system_to_dict(s) == before


def test_chain_fallbacks():
    assert chain_count_fallbacks(default_system()) == {}
    s = replace(default_system(), channel=ChannelConfig(n_tx=126, n_rx=6, n_streams=6))
    assert chain_count_fallbacks(s) == {4: 3, 5: 3}


def test_json_round_trip():
    s = default_system().with_p_max(0.25)
    d = json.loads(json.dumps(system_to_dict(s)))
    assert system_from_dict(d) == s


def test_unknown_keys_rejected():
    with pytest.raises(KeyError):
        system_from_dict({"channel": {"n_antennas": 3}})


def test_schema_accepts_echoed_config():
    sch = config_schema()
    doc = {"experiment": "rfchain_pmf", "trials": 5, "master_seed": 1,
           "sweep": {"p_max": [1.0]}, "system": system_to_dict(default_system())}
    jsonschema.validate(doc, sch)
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({**doc, "experiment": "nope"}, sch)
