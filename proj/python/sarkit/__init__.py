# Copyright 2026 The sarkit Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Synergistic action representations for overactuated control.

The package wraps a C++ core: representation fitting (`fit_sar`), the toy
muscle environments (`make_env`), a soft actor-critic agent (`SacAgent`),
and the experiment pipeline (`commands.play` through
`commands.export_metrics`, mirroring the command-line tool).
"""

from sarkit._core import (
    Env,
    EvalStats,
    PolicyHead,
    Rng,
    SacAgent,
    StepResult,
    SynergyRepresentation,
    blend,
    commands,
    config_hash,
    decode,
    default_config,
    evaluate,
    fit_sar,
    load_activation_log,
    make_env,
    muscle_squash,
    random_representation,
    save_activation_log,
    select_synergies,
    synergy_contributions,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "Env",
    "EvalStats",
    "PolicyHead",
    "Rng",
    "SacAgent",
    "StepResult",
    "SynergyRepresentation",
    "blend",
    "commands",
    "config_hash",
    "decode",
    "default_config",
    "evaluate",
    "fit_sar",
    "load_activation_log",
    "make_env",
    "muscle_squash",
    "random_representation",
    "save_activation_log",
    "select_synergies",
    "synergy_contributions",
    "train",
    "__version__",
]
