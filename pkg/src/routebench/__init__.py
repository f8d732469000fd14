"""route-bench: a discrete-time packet-routing simulator and benchmark.

Nodes route packets with independently learning softmax policies (updated
by gradient ascent on acknowledgment rewards) or with one of three
reference schemes: static shortest path, queue-aware shortest path, and
Q-routing.  The harness sweeps Poisson injection loads over the benchmark
grids and records average delivery times.
"""

from .baselines import (QTable, StaticRoutingTable, best_policy,
                        bestload_recompute, qrouting_select, qrouting_update)
from .gaps import (PolicyTable, TrajectoryRecord, accumulate, dump_policy,
                   init_epsilon_greedy, init_random, parse_policy)
from .harness import (ExperimentConfig, ResultRow, SummaryRow, emit_plot_data,
                      run_cell, run_experiment, summarize)
from .routers import (ALGORITHMS, BestloadRouter, BestRouter, GapsRouter,
                      QRouter, RouterBase, make_router)
from .simulation import (DELIVERED, DISCARDED, Metrics, Packet, RewardEvent,
                         Simulator, simulation_rng)
from .topology import (BUILTIN_TOPOLOGIES, DistanceTable, Topology,
                       build_grid_modified, build_grid_original,
                       builtin_topology, load_topology, load_topology_file,
                       set_link_state, shortest_paths)

__version__ = "0.1.0"
