"""LP-guided scheduling of map/reduce jobs on machines of different speeds.

Solves a linear relaxation of the total weighted completion time, orders jobs
by its solution and places every task on the machine where it finishes first.
FIFO, identical-machine and map-only schedulers serve as baselines, and a
simulator replays schedules under perturbed task durations.

All functions are typehinted, most results are frozen dataclasses
(see pretty.py for their JSON form).
"""
from .errors import *
from .utils import *
from .model import *
from .lpcore import *
from .lprelax import *
from .dmrs import *
from .simulator import *
from .baselines import *
from .bench import *
from .pretty import *
