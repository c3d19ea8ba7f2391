"""Entry point for the jeq command line."""

import os
import sys

# thread pools read these when numpy is first imported
_threads = os.environ.get("JEQ_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ[_var] = _threads

from jeq.cli.dispatch_implementation import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
