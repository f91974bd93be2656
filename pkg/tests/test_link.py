import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from comblink.comb import INFINITE, CombLine, synthesize_flat_comb, synthesize_soliton_comb
from comblink.link import (
    AmplifierSpec,
    ChannelState,
    ConfigError,
    EqualizationScheme,
    LinkConfig,
    PlanEntry,
    apply_amplifier,
    apply_attenuation,
    comb_amp_plan,
    load_config,
    osnr_closed_form,
    osnr_of,
    propagate,
)
from comblink.quantities import db_from_linear, watt_from_dbm

from oracles import HF_1550, analytic_power_threshold_dbm, chain_osnr_db, lin


def _line(p=1e-3, ocnr=INFINITE):
    return CombLine(0, 193.4e12, p, ocnr)


def _gain_eq(config, p):
    return PlanEntry(config.launch_power / (p * config.mod_transmission * config.post_amp.gain))


class TestStages:
    def test_unity_gain_is_identity(self):
        s = ChannelState(1e-3, 1e-7)
        assert apply_amplifier(s, AmplifierSpec(1.0, 10.0), HF_1550, 12.5e9) == s

    def test_single_amplifier_ase(self):
        out = apply_amplifier(ChannelState(1e-6, 0.0), AmplifierSpec(32.0, 3.2), HF_1550, 12.5e9)
        assert out.signal == pytest.approx(32e-6)
        assert out.noise == pytest.approx(1.589e-7, abs=1e-10)

    def test_sub_unity_gain_adds_no_noise(self):
        out = apply_amplifier(ChannelState(1e-3, 2e-7), AmplifierSpec(0.5, 3.2), HF_1550, 12.5e9)
        assert out.noise == 0.5 * 2e-7

    def test_attenuation(self):
        s = ChannelState(1e-3, 1e-6)
        assert apply_attenuation(s, 1.0) == s
        assert apply_attenuation(s, 0.0316).signal == pytest.approx(31.6e-6)
        for g in (0.0, 1.5, -0.1):
            with pytest.raises(ValueError):
                apply_attenuation(s, g)

    @given(st.floats(1e-9, 1.0), st.floats(1e-15, 1e-3), st.floats(1e-6, 1.0))
    def test_attenuation_preserves_osnr(self, sig, noise, g):
        s = ChannelState(sig, noise)
        assert osnr_of(apply_attenuation(s, g)) == pytest.approx(osnr_of(s), rel=1e-14)

    def test_osnr_of(self):
        assert osnr_of(ChannelState(1e-3, 1e-6)) == pytest.approx(1000.0)
        assert osnr_of(ChannelState(1e-3, 0.0)) == INFINITE

    @pytest.mark.parametrize("signal, noise", [(0.0, 0.0), (1e-3, -1e-9)])
    def test_channel_state_rejects(self, signal, noise):
        with pytest.raises(ValueError):
            ChannelState(signal, noise)

    def test_amplifier_spec_rejects(self):
        with pytest.raises(ValueError):
            AmplifierSpec(0.0, 2.0)
        with pytest.raises(ValueError):
            AmplifierSpec(10.0, 0.5)


class TestConfig:
    def test_defaults_match_reference_table(self, defaults):
        d = defaults.to_dict()
        expected = dict(
            b_ref_hz=12.5e9, launch_power_dbm=0.0, mod_loss_db=25.0, comb_amp_nf_db=5.0,
            post_amp_gain_db=15.0, post_amp_nf_db=5.0, span_loss_db=15.0, span_count=1,
            inline_nf_db=5.0, rx_gain_db=15.0, rx_nf_db=5.0, center_wavelength_m=1.55e-6,
        )
        for key, value in expected.items():
            assert d[key] == pytest.approx(value, abs=1e-12), key
        assert defaults.inline_amp.gain * defaults.span_loss == pytest.approx(1.0, abs=1e-12)

    def test_gain_loss_mismatch_rejected(self):
        with pytest.raises(ValueError):
            LinkConfig(inline_amp=AmplifierSpec(30.0, 3.2))

    def test_from_dict_partial(self):
        cfg = LinkConfig.from_dict({"span_count": 40, "span_loss_db": 20})
        assert cfg.span_count == 40
        assert cfg.inline_amp.gain == pytest.approx(100.0)
        assert cfg.post_amp.gain == pytest.approx(lin(15))

    @pytest.mark.parametrize("doc", [{"bogus": 1}, {"span_count": "ten"}, {"span_count": 0}, {"mod_loss_db": -3}])
    def test_from_dict_errors(self, doc):
        with pytest.raises(ConfigError):
            LinkConfig.from_dict(doc)

    def test_load_config(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"span_count": 7}))
        assert load_config(path).span_count == 7
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="line 1"):
            load_config(path)
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.json")


class TestPlan:
    def test_flat_comb_schemes_identical(self, defaults):
        comb = synthesize_flat_comb(5, 193.4e12, 100e9, 1e-5, 1e4)
        plans = [comb_amp_plan(comb, defaults, s) for s in EqualizationScheme]
        assert plans[0] == plans[1] == plans[2]
        assert all(e.mod_attenuation == 1.0 for e in plans[0])

    def test_gain_eq_comb_gain(self, defaults):
        comb = synthesize_flat_comb(1, 193.4e12, 100e9, watt_from_dbm(-11))
        (entry,) = comb_amp_plan(comb, defaults, EqualizationScheme.GAIN_EQ)
        # 1 mW / (79.4 uW * 10^-2.5 * 10^1.5)
        assert entry.comb_gain == pytest.approx(125.89254, rel=1e-6)
        assert db_from_linear(entry.comb_gain) == pytest.approx(21.0, abs=1e-9)

    def test_power_eq_attenuation(self, defaults):
        comb = synthesize_soliton_comb()
        plan = comb_amp_plan(comb, defaults, "power-eq")
        centre = list(comb.indices).index(0)
        assert plan[centre].mod_attenuation == pytest.approx(10**-0.9, rel=1e-9)
        assert min(e.mod_attenuation for e in plan) >= 10**-0.9 * (1 - 1e-12)
        no_eq = comb_amp_plan(comb, defaults, "no-eq")
        assert {e.comb_gain for e in plan} == {e.comb_gain for e in no_eq}

    def test_launch_powers_per_scheme(self, defaults):
        comb = synthesize_soliton_comb()
        for scheme, expected in [
            ("gain-eq", np.full(len(comb), 1e-3)),
            ("no-eq", 1e-3 * comb.powers / comb.powers.max()),
            ("power-eq", np.full(len(comb), 1e-3 * comb.powers.min() / comb.powers.max())),
        ]:
            plan = comb_amp_plan(comb, defaults, scheme)
            launch = [
                defaults.post_amp.gain * defaults.mod_transmission * e.mod_attenuation * e.comb_gain * p
                for e, p in zip(plan, comb.powers)
            ]
            np.testing.assert_allclose(launch, expected, rtol=1e-12)


class TestPropagation:
    @pytest.mark.parametrize(
        "p_line, ocnr_db, spans, expected_db",
        [
            (1e-3, None, 1, 35.0193489),
            (1e-3, None, 40, 21.9620533),
            (1e-3, 20.0, 1, 19.8653826),
            (1e-5, 45.0, 7, None),
        ],
    )
    def test_matches_hand_chain(self, defaults, p_line, ocnr_db, spans, expected_db):
        cfg = defaults.with_spans(spans)
        ocnr = INFINITE if ocnr_db is None else lin(ocnr_db)
        state = propagate(_line(p_line, ocnr), cfg, _gain_eq(cfg, p_line))
        oracle = chain_osnr_db(p_line, ocnr_db, spans)
        assert db_from_linear(osnr_of(state)) == pytest.approx(oracle, abs=1e-9)
        if expected_db is not None:
            assert oracle == pytest.approx(expected_db, abs=1e-6)

    def test_single_span_has_no_inline_noise(self, defaults):
        hfb = HF_1550 * 12.5e9
        state = propagate(_line(), defaults, _gain_eq(defaults, 1e-3))
        g, G, F = lin(-15), lin(15), lin(5)
        # comb amp gain is 10 here; no in-line term at all
        expected_noise = G * hfb * (g * G * lin(-25) * 9 * F + g * (G - 1) * F + (G - 1) / G * F)
        assert state.noise == pytest.approx(expected_noise, rel=1e-12)

    def test_span_entry_power_is_launch_power(self, defaults):
        cfg = defaults
        p = watt_from_dbm(-17)
        plan = _gain_eq(cfg, p)
        hf, b = cfg.photon_energy, cfg.b_ref
        s = apply_amplifier(ChannelState(p, 0.0), AmplifierSpec(plan.comb_gain, cfg.comb_amp_nf), hf, b)
        s = apply_amplifier(apply_attenuation(s, cfg.mod_transmission), cfg.post_amp, hf, b)
        for _ in range(50):
            assert s.signal == pytest.approx(cfg.launch_power, rel=1e-12)
            s = apply_amplifier(apply_attenuation(s, cfg.span_loss), cfg.inline_amp, hf, b)

    def test_closed_form_examples(self, defaults):
        cfg40 = defaults.with_spans(40)
        assert db_from_linear(osnr_closed_form(1e-3, INFINITE, cfg40, _gain_eq(cfg40, 1e-3))) == pytest.approx(21.96, abs=0.01)
        assert db_from_linear(osnr_closed_form(1e-3, 100.0, defaults, _gain_eq(defaults, 1e-3))) == pytest.approx(19.87, abs=0.01)

    @pytest.mark.parametrize("spans", [2, 10, 40])
    def test_closed_form_plateau(self, defaults, spans):
        cfg = defaults.with_spans(spans)
        # 0 dBm -> 10 dBm; at M=1 the residual comb-amp term still moves OSNR by 0.063 dB
        high = [db_from_linear(osnr_closed_form(p, INFINITE, cfg, _gain_eq(cfg, p))) for p in (1e-3, 1e-2, 1e-1)]
        assert abs(high[1] - high[0]) < 0.05
        assert high[2] == high[1]  # comb gain below unity: flat

    def test_closed_form_vectorised(self, defaults):
        p = np.array([1e-6, 1e-5, 1e-4])
        plan = PlanEntry(defaults.launch_power / (p * defaults.mod_transmission * defaults.post_amp.gain))
        vec = osnr_closed_form(p, np.array([INFINITE, 1e4, 1e3]), defaults, plan)
        scalar = [osnr_closed_form(pi, o, defaults, _gain_eq(defaults, pi)) for pi, o in zip(p, [INFINITE, 1e4, 1e3])]
        np.testing.assert_allclose(vec, scalar, rtol=1e-15)


@st.composite
def link_draws(draw):
    span_db = 15 + draw(st.floats(-5, 5))
    cfg = LinkConfig.from_dict(
        {
            "mod_loss_db": 25 + draw(st.floats(-5, 5)),
            "comb_amp_nf_db": 5 + draw(st.floats(-5, 5).filter(lambda x: x >= -5 and 5 + x >= 0)),
            "post_amp_gain_db": 15 + draw(st.floats(-5, 5)),
            "post_amp_nf_db": 5 + draw(st.floats(-5, 5)),
            "span_loss_db": span_db,
            "span_count": draw(st.integers(1, 200)),
            "inline_nf_db": 5 + draw(st.floats(-5, 5)),
            "rx_gain_db": 15 + draw(st.floats(-5, 5)),
            "rx_nf_db": 5 + draw(st.floats(-5, 5)),
        }
    )
    p = watt_from_dbm(draw(st.floats(-40, 10)))
    ocnr = draw(st.one_of(st.just(INFINITE), st.floats(10, 60).map(lin)))
    scheme_att = draw(st.floats(0.05, 1.0))
    return cfg, p, ocnr, scheme_att


@settings(max_examples=300, deadline=None)
@given(link_draws())
def test_closed_form_equals_propagation(draw):
    cfg, p, ocnr, att = draw
    plan = PlanEntry(cfg.launch_power / (p * cfg.mod_transmission * cfg.post_amp.gain), att)
    via_chain = osnr_of(propagate(_line(p, ocnr), cfg, plan))
    assert osnr_closed_form(p, ocnr, cfg, plan) == pytest.approx(via_chain, rel=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.floats(-45, 5), st.floats(0.1, 10), st.one_of(st.just(None), st.floats(10, 60)), st.integers(1, 100))
def test_osnr_monotone_in_power_and_ocnr(p_dbm, step_db, ocnr_db, spans):
    cfg = LinkConfig().with_spans(spans)
    ocnr = INFINITE if ocnr_db is None else lin(ocnr_db)

    def f(pd, o):
        p = watt_from_dbm(pd)
        return osnr_closed_form(p, o, cfg, _gain_eq(cfg, p))

    assert f(p_dbm + step_db, ocnr) >= f(p_dbm, ocnr) * (1 - 1e-12)
    if ocnr_db is not None:
        assert f(p_dbm, lin(ocnr_db + step_db)) >= f(p_dbm, ocnr) * (1 - 1e-12)


@given(st.floats(-45, 5), st.one_of(st.just(None), st.floats(10, 60)), st.integers(1, 199))
def test_osnr_strictly_decreasing_in_spans(p_dbm, ocnr_db, spans):
    p = watt_from_dbm(p_dbm)
    ocnr = INFINITE if ocnr_db is None else lin(ocnr_db)
    a, b = LinkConfig().with_spans(spans), LinkConfig().with_spans(spans + 1)
    assert osnr_closed_form(p, ocnr, b, _gain_eq(b, p)) < osnr_closed_form(p, ocnr, a, _gain_eq(a, p))


def test_source_limited_slope_follows_model(defaults):
    # the local slope is s/(L+s) with s the comb-amp term and L the link term (all in hf*B units)
    g, F = lin(-15), lin(5)
    for m in (2, 10, 40):
        cfg = defaults.with_spans(m)
        p = watt_from_dbm(analytic_power_threshold_dbm(m) - 20)

        def osnr_db(pp):
            return db_from_linear(osnr_closed_form(pp, INFINITE, cfg, _gain_eq(cfg, pp)))

        d = 1e-4
        slope = (osnr_db(p * 10 ** (d / 10)) - osnr_db(p * 10 ** (-d / 10))) / (2 * d)
        link = g * (lin(15) - 1) * F * m + (lin(15) - 1) / lin(15) * F
        source = g * F * (1e-3 / p - lin(15) * lin(-25))
        assert slope == pytest.approx(g * F * 1e-3 / p / (link + source), abs=1e-6)


@pytest.mark.xfail(strict=True, reason="a 3 dB step at 20 dB below the 1-dB point gains only about 2.84 dB in this model")
def test_source_limited_three_db_step(defaults):
    gains = []
    for m in (2, 40):
        cfg = defaults.with_spans(m)
        p0 = watt_from_dbm(analytic_power_threshold_dbm(m) - 20)
        p1 = p0 * lin(3)
        o0 = db_from_linear(osnr_closed_form(p0, INFINITE, cfg, _gain_eq(cfg, p0)))
        o1 = db_from_linear(osnr_closed_form(p1, INFINITE, cfg, _gain_eq(cfg, p1)))
        gains.append(o1 - o0)
    assert all(abs(gd - 3.0) <= 0.05 for gd in gains)
    assert abs(gains[0] - gains[1]) <= 0.05
