"""Decision support for vector-borne disease diagnosis and treatment.

Clinical facts live in an indexed RDF triple store; NVBDCP guideline rules
are applied by forward chaining with per-fact provenance; graph-pattern
queries, ontology quality metrics, a text-to-RDF extraction pipeline, and
an event-sourced patient-case workflow sit on top. See README.md.
"""

from .terms import Iri, Literal, Triple
from .store import Graph

__version__ = "0.1.0"

__all__ = ["Iri", "Literal", "Triple", "Graph", "__version__"]
