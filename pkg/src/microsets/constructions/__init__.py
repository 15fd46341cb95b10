"""Lazy closed-form constructions: nano scheme, spacing scaffold, pico scheme, rational covers."""

from .gdelta import (
    GdeltaRationalScheme,
    InexpressibleEpsilon,
    RationalInterval,
    dyadic_enumeration,
    rational_cover_stage,
    rational_enumeration,
    rational_index,
)
from .nano import (
    NanoScheme,
    NodeRef,
    NotInChildren,
    nano_child,
    nano_f,
    nano_length,
    nano_level,
    nano_S,
    nano_stage,
    nano_T,
)
from .pico import HorizonExceeded, PicoScheme, h_of, k_of, node_length, pico_stage
from .spacing import F_of, HostTooShort, SpacingScheme, spacing_place

__all__ = [name for name in dir() if not name.startswith("_")]
