"""Batched falling-sand simulator with procedural worlds and RL tasks."""

__version__ = "0.1.0"

from .elements import (  # noqa: F401
    DomainError,
    ElementId,
    N_CHANNELS,
    N_ELEMENTS,
    World,
    element_counts,
    get_element,
    make_world,
    set_element,
    world_channels,
    world_digest,
)
from .engine import DEFAULT_CONFIG, RuleConfig, add_wind, step  # noqa: F401
from .procgen import PcgParams, gen_start_state, test_suite  # noqa: F401
from .serialize import ParseError, load_world, save_world  # noqa: F401
from .tasks import (  # noqa: F401
    Action,
    EnvKind,
    EpisodeDoneError,
    RejectedActionError,
    env_observe,
    env_reset,
    env_step,
    gen_world_model_pair,
)
