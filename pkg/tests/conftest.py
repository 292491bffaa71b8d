import os
import sys

# allow running the suite from a bare checkout, before `pip install -e .`
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))
