import sys
from pathlib import Path

# make the shared helpers (_oracles, _datasets, _instances) importable
sys.path.insert(0, str(Path(__file__).parent))
