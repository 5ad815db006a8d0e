from .analysis import *
from .dom_bot import DominationBot, Scenario, run_scenario
