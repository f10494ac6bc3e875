"""
Scenarios and CSV output
========================

Every capability can also be driven from a JSON scenario, from Python or
from the ``weakvalues`` command line. Outputs are CSV with a ``#`` header
carrying the relation being checked and the full configuration.
"""

# %%
import json

from weakvalues.cli import run_scenario
from weakvalues.scenario import list_builtin, parse_scenario

print(list_builtin())

# %%
doc = {"kind": "weakvalue", "pre_state": "up_x", "post_state": "up_y", "observable": "sigma_z"}
print(run_scenario(parse_scenario(json.dumps(doc))))

# %%
# Explicit matrices use [re, im] pairs for complex entries.
doc = {"kind": "nonhermitian", "system": [[0, 0], [0, [0, -0.1]]], "pre_state": [0.6, 0.8],
       "observable": "sigma_z", "delta": 0.1, "T": 5.0, "samples": 2000, "seed": 3}
print(run_scenario(parse_scenario(json.dumps(doc)), workers=2))
