from . import misc
from . import logging
from . import config
