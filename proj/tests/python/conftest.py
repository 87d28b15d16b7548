import os
import sys

# Under ctest the package lives in the build tree; after `pip install .`
# this is a no-op and the installed package is used.
_build_python = os.environ.get("NEGAUDIT_PYTHON_DIR")
if _build_python and _build_python not in sys.path:
    sys.path.insert(0, _build_python)
