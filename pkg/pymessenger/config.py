from __future__ import absolute_import
from __future__ import unicode_literals
from __future__ import print_function
from __future__ import division
from builtins import open
from future import standard_library
standard_library.install_aliases()
import logging
from typing import Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from . import utils
from .graf import GrafParams
from .kinmodel import KinConfig, random_config
from .mass_geometry import MassSystem, PhaseState
from .nbody import IntegratorParams, Scenario
from .partitions import MessengerTuple, ParameterError
from .policies import policy_from_dict
from .potential import PotentialSpec

logger = logging.getLogger(__name__)

Matrix = Union[float, List[List[float]]]


class ConfigError(ValueError):
    pass


class Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class UnitsSection(Section):
    """ Unit labels; the gravitational constant is fixed to one."""
    length: str = "1"
    mass: str = "1"
    time: str = "1"
    G: float = 1.0

    @field_validator("G")
    @classmethod
    def unit_gravity(cls, value):
        if value != 1.0:
            raise ValueError("only units with G = 1 are supported")
        return value


class SystemSection(Section):
    masses: List[float] = Field(min_length=1)
    d: int = Field(ge=1)


class PotentialSection(Section):
    kind: Literal["gravity", "homogeneous", "free"] = "gravity"
    alpha: Matrix = 1.0
    coupling: Matrix = -1.0


class InitialSection(Section):
    """ Initial phase point; give momenta p or velocities v, not both. Start at t > 0 for cluster analysis."""
    t: float = 1.0
    q: List[List[float]]
    p: Optional[List[List[float]]] = None
    v: Optional[List[List[float]]] = None
    com_frame: bool = True


class IntegratorSection(Section):
    method: Literal["DOP853", "RK45"] = "DOP853"
    rtol: float = Field(default=1e-10, gt=0.0)
    atol: float = Field(default=1e-12, gt=0.0)
    t_end: float = 10.0
    min_step: float = Field(default=1e-12, gt=0.0)
    max_step: Optional[float] = None
    max_steps: int = Field(default=100000, ge=1)
    encounter_factor: float = Field(default=0.05, gt=0.0)
    encounter_floor: float = Field(default=1e-6, ge=0.0)
    drift_tol: float = Field(default=1e-6, gt=0.0)


class GrafSection(Section):
    delta: float = Field(default=0.1, gt=0.0, le=1.0)
    epsilon: float = Field(default=0.5, gt=0.0, lt=1.0)
    tie_break: Literal["rank_then_canonical"] = "rank_then_canonical"
    time_tol: float = Field(default=1e-9, gt=0.0, lt=1.0)


class PoincareSection(Section):
    m: int = Field(default=4, ge=2)
    L: float = Field(default=10.0, gt=0.0)
    tuple: Optional[List[List[int]]] = None


class KinmodelSection(Section):
    """ Kinematical-model run; without q and v a valid initial configuration is drawn from the seed."""
    dimension: Literal[1, 2] = 1
    m_min: float = Field(default=1.0, gt=0.0)
    m_max: float = Field(default=2.0, gt=0.0)
    masses: Optional[List[float]] = None
    q: Optional[List[List[float]]] = None
    v: Optional[List[List[float]]] = None
    seed: int = 0
    collisions: int = Field(default=20, ge=1)
    policy: Dict[str, Union[str, float, int]] = Field(
        default_factory=lambda: {"kind": "random-mass-exchange", "dt_min": 0.1, "dt_max": 10.0})


class RunConfig(Section):
    """ The single configuration document of a run."""
    units: UnitsSection = Field(default_factory=UnitsSection)
    system: Optional[SystemSection] = None
    potential: PotentialSection = Field(default_factory=PotentialSection)
    initial: Optional[InitialSection] = None
    integrator: IntegratorSection = Field(default_factory=IntegratorSection)
    graf: GrafSection = Field(default_factory=GrafSection)
    poincare: PoincareSection = Field(default_factory=PoincareSection)
    kinmodel: KinmodelSection = Field(default_factory=KinmodelSection)


def parse_config(text, source="<string>"):
    try:
        return RunConfig.model_validate_json(text)
    except ValidationError as err:
        raise ConfigError("{}: invalid configuration\n{}".format(source, err))


def load_config(path):
    """
    Read and validate a JSON configuration document.

    Raises:
        OSError: if the file cannot be read.
        ConfigError: if it is not valid JSON or fails validation; the message names the path.
    """
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    cfg = parse_config(text, path)
    logger.debug("Configuration {} loaded (digest {}).".format(path, config_digest(cfg)[:12]))
    return cfg


def config_digest(cfg):
    """ sha256 of the canonical JSON form of the validated configuration."""
    return utils.digest(cfg.model_dump(mode="json"))


def to_potential(cfg):
    section, n = cfg.potential, len(cfg.system.masses)
    if section.kind == "gravity":
        return PotentialSpec.gravity(cfg.system.masses)
    if section.kind == "free":
        return PotentialSpec.free(n)
    return PotentialSpec.homogeneous(section.alpha, section.coupling, n)


def to_scenario(cfg, name=None):
    """
    Build the N-body scenario of a configuration.

    Raises:
        ConfigError: if the system or initial section is missing or inconsistent.
    """
    if cfg.system is None or cfg.initial is None:
        raise ConfigError("an N-body run needs both the 'system' and the 'initial' section")
    init = cfg.initial
    if (init.p is None) == (init.v is None):
        raise ConfigError("initial section needs exactly one of 'p' and 'v'")
    try:
        sys = MassSystem(cfg.system.masses, cfg.system.d)
        if init.p is not None:
            state = PhaseState(sys.shape(init.q), sys.shape(init.p), init.t)
        else:
            state = PhaseState.from_velocities(sys, init.q, init.v, init.t)
        integrator = cfg.integrator.model_dump()
        if integrator["max_step"] is None:
            integrator["max_step"] = np.inf
        params = IntegratorParams(**integrator)
        graf = GrafParams(**cfg.graf.model_dump())
        return Scenario(sys, to_potential(cfg), state, params, graf, cfg.poincare.model_dump(),
                        com_frame=init.com_frame, name=name)
    except ParameterError as err:
        raise ConfigError("inconsistent N-body configuration: {}".format(err))


def to_policy(cfg):
    return policy_from_dict(cfg.kinmodel.policy)


def to_kin_config(cfg, seed=None, collisions=None):
    """
    Build the kinematical-model initial data; seed and collisions override the configured values. Without explicit
    q and v a random valid configuration is drawn from the seed.
    """
    k = cfg.kinmodel
    seed = k.seed if seed is None else int(seed)
    collisions = k.collisions if collisions is None else int(collisions)
    try:
        if k.q is None or k.v is None or k.masses is None:
            return random_config(np.random.default_rng(seed), k.dimension, k.m_min, k.m_max, collisions, seed=seed)
        return KinConfig(k.masses, k.q, k.v, k.m_min, k.m_max, seed=seed, collisions=collisions,
                         dimension=k.dimension)
    except ParameterError as err:
        raise ConfigError("invalid kinematical-model configuration: {}".format(err))


def default_tuple(cfg):
    """ Messenger tuple named in the poincare section, or None."""
    if cfg.poincare.tuple is None:
        return None
    return MessengerTuple(*cfg.poincare.tuple)
