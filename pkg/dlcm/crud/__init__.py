# Run registry operations
from .run import (
    create_run,
    finish_run,
    get_run,
    get_run_by_out_dir,
    get_run_metrics,
    get_runs,
    record_metrics,
    resolve_run_dir,
)
