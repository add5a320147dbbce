"""Decision models: parse, verify, evaluate and ask questions about them.

Models are passed as DSL text. Inputs, questions and results are plain
dicts; rendered formats (text, table, csv, dot, cypher) come back as str.
"""

import json

from . import _explaineo
from ._errors import ExplaineoError

__all__ = ["ExplaineoError", "parse", "check", "evaluate", "ask", "export"]


def _text(value):
    return value if isinstance(value, str) else json.dumps(value)


def parse(source):
    """Validate a model and summarise its names and services."""
    return json.loads(_explaineo.parse(source))


def check(source, check="all", service=None):
    """Run one verification check, or all of them as a list."""
    return json.loads(_explaineo.check(source, check, service))


def evaluate(source, inputs):
    """Evaluate a model on an inputs dict; returns the instance document."""
    return json.loads(_explaineo.evaluate(source, _text(inputs)))


def ask(source, question, inputs=None, profile=None, format="json"):
    """Answer a question dict ({"qtype", "target", "parameters"}).

    Decision questions need `inputs`. With format="json" the answer is a
    dict; other formats return the rendered text.
    """
    out = _explaineo.ask(source, _text(question), None if inputs is None else _text(inputs), profile, format)
    return json.loads(out) if format == "json" else out


def export(source, inputs=None, to="json", graph="simplified"):
    """Export the model graph, decorated with an evaluation when inputs are given."""
    out = _explaineo.export(source, None if inputs is None else _text(inputs), to, graph)
    return json.loads(out) if to == "json" else out
