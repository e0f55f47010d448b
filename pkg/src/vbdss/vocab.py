"""Well-known IRIs and the namespaces used by the shipped knowledge base."""

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
OWL_NS = "http://www.w3.org/2002/07/owl#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"
SWRLB_NS = "http://www.w3.org/2003/11/swrlb#"
VBD_NS = "http://example.org/vbd#"

RDF_TYPE = RDF_NS + "type"
RDFS_SUBCLASSOF = RDFS_NS + "subClassOf"
RDFS_DOMAIN = RDFS_NS + "domain"
RDFS_RANGE = RDFS_NS + "range"
RDFS_LABEL = RDFS_NS + "label"
RDFS_COMMENT = RDFS_NS + "comment"

OWL_CLASS = OWL_NS + "Class"
OWL_OBJECT_PROPERTY = OWL_NS + "ObjectProperty"
OWL_DATATYPE_PROPERTY = OWL_NS + "DatatypeProperty"
OWL_DISJOINT_WITH = OWL_NS + "disjointWith"

XSD_STRING = XSD_NS + "string"
XSD_BOOLEAN = XSD_NS + "boolean"
XSD_INTEGER = XSD_NS + "integer"
XSD_DECIMAL = XSD_NS + "decimal"

SWRLB_EQUAL = SWRLB_NS + "equal"

# Annotation predicates counted by the metrics census.
ANNOTATION_PREDICATES = frozenset({RDFS_LABEL, RDFS_COMMENT})

# Default prefix table for KB files, rules, and queries.
STANDARD_PREFIXES = {
    "": VBD_NS,
    "rdf": RDF_NS,
    "rdfs": RDFS_NS,
    "owl": OWL_NS,
    "xsd": XSD_NS,
    "swrlb": SWRLB_NS,
}
