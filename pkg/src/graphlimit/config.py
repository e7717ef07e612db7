"""JSON run descriptions: parsing into laws/functions and echoing back.

A run is one JSON object. The model part looks like::

    {"law": {"kind": "small_world", "r": 0.3},
     "interaction": {"kind": "rational"},
     "initial": {"kind": "sin2", "freq": 4.0},
     "T": 10.0, "dt": 0.01, "seed": 0}

Kernels (graphons, mean weights) are ``{"kind": "constant", "value": c}`` or
``{"kind": "product", "scale": s}``; a delta law takes either ``"wbar"`` (a
kernel) or ``"of"`` (another law whose mean it uses).
"""
from . import dynamics, laws
from .errors import ParameterError


def _need(spec, key, where):
    if not isinstance(spec, dict):
        raise ParameterError(f"{where} must be an object, got {spec!r}")
    if key not in spec:
        raise ParameterError(f"{where} is missing '{key}'")
    return spec[key]


def _number(spec, key, where, default=None):
    value = spec.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParameterError(f"{where}.{key} must be a number, got {value!r}")
    return float(value)


def parse_kernel(spec, where="kernel"):
    kind = _need(spec, "kind", where)
    if kind == "constant":
        return laws.ConstantKernel(_number(spec, "value", where))
    if kind == "product":
        return laws.ProductKernel(_number(spec, "scale", where, 1.0))
    raise ParameterError(f"unknown {where} kind {kind!r}")


def parse_law(spec, where="law"):
    kind = _need(spec, "kind", where)
    if kind == "bernoulli":
        return laws.make_bernoulli_graphon(parse_kernel(_need(spec, "W", where), where + ".W"))
    if kind == "garlaschelli_const":
        return laws.make_garlaschelli_const(_number(spec, "p", where))
    if kind == "garlaschelli_xy":
        return laws.make_garlaschelli_xy()
    if kind == "exponential":
        return laws.make_exponential(_number(spec, "lam", where, 1.0))
    if kind == "small_world":
        return laws.make_small_world(_number(spec, "r", where))
    if kind == "delta":
        if "of" in spec:
            return laws.make_delta(parse_law(spec["of"], where + ".of"))
        return laws.make_delta(parse_kernel(_need(spec, "wbar", where), where + ".wbar"))
    raise ParameterError(f"unknown law kind {kind!r}")


_INTERACTIONS = {
    "rational": dynamics.make_rational_attraction,
    "sine": dynamics.make_sine,
}


def parse_interaction(spec):
    kind = _need(spec, "kind", "interaction")
    if kind not in _INTERACTIONS:
        raise ParameterError(f"unknown interaction kind {kind!r}")
    return _INTERACTIONS[kind]()


def interaction_spec(D):
    return {"kind": D.name}


def parse_initial(spec):
    kind = _need(spec, "kind", "initial")
    if kind == "sin2":
        return dynamics.make_sin_squared(_number(spec, "freq", "initial", 4.0))
    if kind == "constant":
        return dynamics.make_constant_initial(_number(spec, "value", "initial"))
    raise ParameterError(f"unknown initial data kind {kind!r}")


DEFAULT_MODEL = {
    "interaction": {"kind": "rational"},
    "initial": {"kind": "sin2", "freq": 4.0},
    "dt": 0.01,
    "seed": 0,
}


def parse_model(cfg):
    """``(law, D, g)`` from a run description."""
    return (parse_law(_need(cfg, "law", "config")),
            parse_interaction(cfg.get("interaction", DEFAULT_MODEL["interaction"])),
            parse_initial(cfg.get("initial", DEFAULT_MODEL["initial"])))


def resolve(cfg, defaults):
    """Fill missing top-level keys from ``defaults`` and normalise the model
    specs to their canonical echo form."""
    if not isinstance(cfg, dict):
        raise ParameterError("config must be a JSON object")
    out = {**DEFAULT_MODEL, **defaults, **cfg}
    law, D, g = parse_model(out)
    out["law"] = law.spec()
    out["interaction"] = interaction_spec(D)
    out["initial"] = g.spec()
    return out
