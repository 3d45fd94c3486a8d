import logging
from pathlib import Path
from typing import Sequence, Union

import networkx as nx

from src.core.structure import Dag
from src.exceptions import DataValidationError

logger = logging.getLogger(__name__)

LABEL_STYLE = {"shape": "box", "style": "filled", "fillcolor": "lightgrey", "penwidth": "2"}
FEATURE_STYLE = {"shape": "ellipse"}


def _quoted(name: str) -> str:
    # pydot leaves double-quoted ids untouched, which keeps ':' from being read as a port
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


class DotExporter:
    """Renders networks as Graphviz DOT through networkx and pydot"""

    def __init__(self, graph_name: str = "network"):
        self.graph_name = graph_name

    def to_graph(self, g: Dag, names: Sequence[str]) -> nx.DiGraph:
        graph = nx.DiGraph(name=self.graph_name)
        labels = set(g.labels)
        for node in sorted(g.nodes):
            style = LABEL_STYLE if node in labels else FEATURE_STYLE
            graph.add_node(_quoted(names[node]), **style)
        for parent, child in g.edges():
            graph.add_edge(_quoted(names[parent]), _quoted(names[child]))
        return graph

    def to_dot(self, g: Dag, names: Sequence[str]) -> str:
        """
        DOT text with one statement per node and edge, in node id order.

        Label nodes are drawn as filled boxes, features as ellipses.
        """
        text = nx.nx_pydot.to_pydot(self.to_graph(g, names)).to_string()
        return text if text.endswith("\n") else text + "\n"

    def write(self, g: Dag, names: Sequence[str], path: Union[str, Path]):
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write(self.to_dot(g, names))
        except OSError as e:
            raise DataValidationError(f"cannot write {path}: {e}")
        logger.info(f"DOT graph with {len(g.nodes)} nodes written to {path}")
