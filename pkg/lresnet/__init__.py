from .base import *
from .bench import *
from .checks import *
from .command import *
from .context import *
from .converters import *
from .errors import *
from .geometry import *
from .grad import *
from .residual import *
from .toynet import *
from .utils import *
from .verify import *
