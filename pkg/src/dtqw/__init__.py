"""Discrete-time quantum walks on complex networks, compiled to circuits."""
from .circuit import (
    Circuit,
    Diffusion,
    MCX,
    RegisterLayout,
    compile_walk_circuit,
    decode_index,
    deserialize_circuit,
    encode_arc,
    resource_estimate,
    serialize_circuit,
)
from .errors import CapacityError, CircuitError, GraphError, ParseError
from .graph import (
    Graph,
    WsParams,
    complete_graph,
    cycle_graph,
    deserialize_graph,
    edge_label,
    generate_ws,
    parse_edge_list,
    serialize_graph,
    star_graph,
)
from .oracle import (
    build_walk_operators,
    evolve,
    initial_state_uniform,
    node_probabilities,
    single_arc_state,
)
from .simulator import (
    Custom,
    SingleArc,
    Uniform,
    inject_initial_state,
    node_probabilities_from_sv,
    run,
    validity_report,
)

__version__ = "0.1.0"
