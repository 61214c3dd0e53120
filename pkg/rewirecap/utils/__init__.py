"""
rewirecap.utils package initializer

command_utils imports graph_core, which itself imports from this package;
import it directly as rewirecap.utils.command_utils.
"""

# Logging
from .log_manager import LogManager

# Rewiring bookkeeping
from .rewire_utils import RewireUtils

# Result files and state
from .file_state_utils import ResultStore
from .tempfile_utils import TempFileManager

# Pipeline helpers
from .pipeline_utils import PipelineHelper, CellSpec
