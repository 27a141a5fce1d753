#!/usr/bin/env python3

from .analyze import analyze
from .example1 import example1
from .simulate import simulate
from .theorem1 import theorem1

COMMAND_FUNCS = {
    "simulate": simulate,
    "analyze": analyze,
    "theorem1": theorem1,
    "example1": example1,
}
