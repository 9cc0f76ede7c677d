from .version import __version__, sysconfig
from .utils import *
from .fixedpoint import *
from .bandit import *
from .r1cs import *
from .gadgets import *
from .circuit import *
from .proof import *
from .processing import *
from .organization import *
from .calculations import *
from .plotting import *
from .classes import *
