# General tools.
from .config import *
from .errors import *
from .flags import *
from .logger import *
from .other import *

# Execution tools.
from .driver import *
from .manifest import *
from .parallel import *
