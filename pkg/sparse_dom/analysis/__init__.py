from .errors import *
from .grid import *
from .sparse import *
from .orlicz import *
from .weights import *
from .czo import *
from .domination import *
from .reports import *
