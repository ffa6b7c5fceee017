"""The shipped constraint corpus.

88 shapes split 47 topological / 23 resource / 18 state, plus 3 temporal and
2 delta shapes shipped alongside (93 in all). Five shapes carry canonical
operator-facing messages; the rest are per-class variants that pad each family
to its published count while staying satisfiable on generated topologies.
"""

from __future__ import annotations

from .nkg import ClassHierarchy
from .policy import (
    AttributeEnum,
    AttributeRange,
    DeltaBound,
    ForbiddenAdjacency,
    Freshness,
    PolicySet,
    PolicyShape,
    RequiredMediation,
)

MSG_AMF_UPF = "AMF cannot connect directly to UPF"
MSG_SLICE_BANDWIDTH = "Slice bandwidth cannot exceed 100 Mbps"
MSG_INVALID_STATUS = "Invalid node status"
MSG_STALE = "Governance Failure: Telemetry too stale (>15s)"
MSG_CAPACITY_DELTA = "Adversarial Protection: Capacity change exceeds ±20%"

FRESHNESS_MAX_AGE = 15
DELTA_MIN_PERCENT = 80.0
DELTA_MAX_PERCENT = 120.0

_SHORT = {
    "AMFFunction": "amf",
    "SMFFunction": "smf",
    "UPFFunction": "upf",
    "GnbFunction": "gnb",
    "TransportNode": "tr",
    "NetworkSlice": "slice",
    "ManagedFunction": "mf",
}

_LABEL = {
    "AMFFunction": "AMF functions",
    "SMFFunction": "SMF functions",
    "UPFFunction": "UPF functions",
    "GnbFunction": "gNB functions",
    "TransportNode": "transport nodes",
    "NetworkSlice": "network slices",
    "ManagedFunction": "managed functions",
}

# Interfaces each class must never terminate, in either edge direction.
IFACE_BANS: dict[str, tuple[str, ...]] = {
    "AMFFunction": ("N3", "N4", "N6", "transportLink", "s-nssai-config"),
    "SMFFunction": ("N2", "N3", "N6", "transportLink", "s-nssai-config"),
    "UPFFunction": ("N2", "N11"),
    "GnbFunction": ("N4", "N6", "N11"),
    "TransportNode": ("N2", "N3", "N4", "N11", "s-nssai-config"),
    "NetworkSlice": ("N2", "N3", "N4", "N6", "N11", "transportLink", "measurementPoint"),
}

# Class pairs that must never share a direct edge on any interface.
_PAIR_BANS: tuple[tuple[str, str, str], ...] = (
    ("AMFFunction", "UPFFunction", MSG_AMF_UPF),
    ("AMFFunction", "TransportNode", "AMF functions may not attach to transport nodes directly"),
    ("SMFFunction", "GnbFunction", "SMF functions may not attach to gNB functions directly"),
    ("SMFFunction", "TransportNode", "SMF functions may not attach to transport nodes directly"),
    ("NetworkSlice", "AMFFunction", "Network slices may not bind AMF functions directly"),
    ("NetworkSlice", "SMFFunction", "Network slices may not bind SMF functions directly"),
    ("NetworkSlice", "TransportNode", "Network slices may not bind transport nodes directly"),
    ("AMFFunction", "AMFFunction", "AMF functions may not peer with each other"),
    ("SMFFunction", "SMFFunction", "SMF functions may not peer with each other"),
    ("UPFFunction", "UPFFunction", "UPF functions may not peer with each other"),
    ("GnbFunction", "GnbFunction", "gNB functions may not peer with each other"),
    ("NetworkSlice", "NetworkSlice", "Network slices may not bind each other"),
)

# (focus, peer, via): every short active path focus->peer must pass a via node.
_MEDIATIONS: tuple[tuple[str, str, str], ...] = (
    ("AMFFunction", "UPFFunction", "SMFFunction"),
    ("GnbFunction", "SMFFunction", "AMFFunction"),
    ("NetworkSlice", "AMFFunction", "GnbFunction"),
    ("NetworkSlice", "SMFFunction", "GnbFunction"),
    ("UPFFunction", "AMFFunction", "SMFFunction"),
    ("SMFFunction", "GnbFunction", "AMFFunction"),
)

# (id tail, class, attribute, min, max)
_RANGES: tuple[tuple[str, str, str, float | None, float | None], ...] = (
    ("slice-bandwidth-min", "NetworkSlice", "allocatedBandwidth", 0.0, None),
    ("amf-planned", "AMFFunction", "plannedCapacity", 0.0, 200.0),
    ("smf-planned", "SMFFunction", "plannedCapacity", 0.0, 200.0),
    ("upf-planned", "UPFFunction", "plannedCapacity", 0.0, 200.0),
    ("gnb-planned", "GnbFunction", "plannedCapacity", 0.0, 200.0),
    ("tr-planned", "TransportNode", "plannedCapacity", 0.0, 200.0),
    ("slice-planned", "NetworkSlice", "plannedCapacity", 0.0, 200.0),
    ("mf-planned", "ManagedFunction", "plannedCapacity", 0.0, 200.0),
    ("amf-session-load", "AMFFunction", "sessionLoad", 0.0, 100.0),
    ("smf-session-load", "SMFFunction", "sessionLoad", 0.0, 100.0),
    ("upf-session-load", "UPFFunction", "sessionLoad", 0.0, 100.0),
    ("amf-registered-ues", "AMFFunction", "registeredUes", 0.0, 100000.0),
    ("smf-pdu-sessions", "SMFFunction", "pduSessions", 0.0, 50000.0),
    ("upf-pdu-sessions", "UPFFunction", "pduSessions", 0.0, 50000.0),
    ("upf-throughput", "UPFFunction", "throughputMbps", 0.0, 10000.0),
    ("gnb-connected-ues", "GnbFunction", "connectedUes", 0.0, 20000.0),
    ("gnb-radio-utilization", "GnbFunction", "radioUtilization", 0.0, 100.0),
    ("tr-link-utilization", "TransportNode", "linkUtilization", 0.0, 100.0),
    ("tr-capacity", "TransportNode", "capacityGbps", 0.0, 400.0),
    ("slice-gbr", "NetworkSlice", "guaranteedBitrate", 0.0, 100.0),
    ("gnb-cell-count", "GnbFunction", "cellCount", 1.0, 64.0),
    ("amf-ta-count", "AMFFunction", "taCount", 1.0, 1000.0),
)

_OPERATIONAL_CLASSES = (
    "AMFFunction",
    "SMFFunction",
    "UPFFunction",
    "GnbFunction",
    "TransportNode",
    "NetworkSlice",
)

# Classes with no standby role: STANDBY is a lifecycle violation for them.
_STRICT_ACTIVE = ("AMFFunction", "GnbFunction", "TransportNode")
_STANDBY_OK = ("SMFFunction", "UPFFunction", "NetworkSlice")

_AUDIT_CLASSES = ("AMFFunction", "SMFFunction", "UPFFunction", "GnbFunction", "NetworkSlice")


def _topological() -> list[PolicyShape]:
    shapes = []
    for cls, ifaces in IFACE_BANS.items():
        for iface in ifaces:
            shapes.append(
                PolicyShape(
                    id=f"topo-iface-{_SHORT[cls]}-{iface.lower()}",
                    target_class=cls,
                    constraint=ForbiddenAdjacency(iface=iface, peer_class="Top"),
                    message=f"{_LABEL[cls].capitalize()} must not terminate {iface} links",
                )
            )
    for focus, peer, message in _PAIR_BANS:
        shapes.append(
            PolicyShape(
                id=f"topo-pair-{_SHORT[focus]}-{_SHORT[peer]}",
                target_class=focus,
                constraint=ForbiddenAdjacency(iface="*", peer_class=peer),
                message=message,
            )
        )
    for focus, peer, via in _MEDIATIONS:
        shapes.append(
            PolicyShape(
                id=f"topo-med-{_SHORT[focus]}-{_SHORT[peer]}-via-{_SHORT[via]}",
                target_class=focus,
                constraint=RequiredMediation(peer_class=peer, via_class=via),
                message=(
                    f"{_LABEL[focus].capitalize()} must reach {_LABEL[peer]} "
                    f"through {_LABEL[via]}"
                ),
            )
        )
    shapes.append(
        PolicyShape(
            id="topo-mf-slice-translink",
            target_class="ManagedFunction",
            constraint=ForbiddenAdjacency(iface="transportLink", peer_class="NetworkSlice"),
            message="Managed functions must not carry transport links to network slices",
        )
    )
    shapes.append(
        PolicyShape(
            id="topo-mf-mf-snssai",
            target_class="ManagedFunction",
            constraint=ForbiddenAdjacency(iface="s-nssai-config", peer_class="ManagedFunction"),
            message="Slice membership edges must not join two managed functions",
        )
    )
    return shapes


def _resource() -> list[PolicyShape]:
    shapes = [
        PolicyShape(
            id="res-slice-bandwidth-max",
            target_class="NetworkSlice",
            constraint=AttributeRange(
                attribute="allocatedBandwidth", min_inclusive=None, max_inclusive=100.0
            ),
            message=MSG_SLICE_BANDWIDTH,
        )
    ]
    for tail, cls, attribute, low, high in _RANGES:
        bounds = f"[{low:g}, {high:g}]" if high is not None else f"at least {low:g}"
        shapes.append(
            PolicyShape(
                id=f"res-{tail}",
                target_class=cls,
                constraint=AttributeRange(
                    attribute=attribute, min_inclusive=low, max_inclusive=high
                ),
                message=f"{_LABEL[cls].capitalize()} must keep {attribute} within {bounds}",
            )
        )
    return shapes


def _state() -> list[PolicyShape]:
    operational = frozenset({"ACTIVE", "STANDBY"})
    shapes = [
        PolicyShape(
            id="state-mf-operational",
            target_class="ManagedFunction",
            constraint=AttributeEnum(attribute="status", allowed=operational),
            message=MSG_INVALID_STATUS,
        )
    ]
    for cls in _OPERATIONAL_CLASSES:
        shapes.append(
            PolicyShape(
                id=f"state-{_SHORT[cls]}-operational",
                target_class=cls,
                constraint=AttributeEnum(attribute="status", allowed=operational),
                message=f"{_LABEL[cls].capitalize()} must be in an operational status",
            )
        )
    for cls in _STRICT_ACTIVE:
        shapes.append(
            PolicyShape(
                id=f"state-{_SHORT[cls]}-lifecycle",
                target_class=cls,
                constraint=AttributeEnum(attribute="status", allowed=frozenset({"ACTIVE"})),
                message=f"{_LABEL[cls].capitalize()} have no standby role and must stay ACTIVE",
            )
        )
    for cls in _STANDBY_OK:
        shapes.append(
            PolicyShape(
                id=f"state-{_SHORT[cls]}-lifecycle",
                target_class=cls,
                constraint=AttributeEnum(attribute="status", allowed=operational),
                message=f"{_LABEL[cls].capitalize()} must be active or on standby",
            )
        )
    for cls in _AUDIT_CLASSES:
        shapes.append(
            PolicyShape(
                id=f"state-{_SHORT[cls]}-audit",
                target_class=cls,
                constraint=AttributeEnum(attribute="status", allowed=operational),
                message=f"Audit: {_LABEL[cls]} outside operational statuses",
            )
        )
    return shapes


def _temporal() -> list[PolicyShape]:
    return [
        PolicyShape(
            id="temp-mf-fresh",
            target_class="ManagedFunction",
            constraint=Freshness(max_age_seconds=FRESHNESS_MAX_AGE),
            message=MSG_STALE,
        ),
        PolicyShape(
            id="temp-slice-fresh",
            target_class="NetworkSlice",
            constraint=Freshness(max_age_seconds=FRESHNESS_MAX_AGE),
            message="Governance Failure: Slice telemetry too stale (>15s)",
        ),
        PolicyShape(
            id="temp-tr-fresh",
            target_class="TransportNode",
            constraint=Freshness(max_age_seconds=FRESHNESS_MAX_AGE),
            message="Governance Failure: Transport telemetry too stale (>15s)",
        ),
    ]


def _delta() -> list[PolicyShape]:
    return [
        PolicyShape(
            id="delta-slice-capacity",
            target_class="NetworkSlice",
            constraint=DeltaBound(
                attribute="plannedCapacity",
                min_percent=DELTA_MIN_PERCENT,
                max_percent=DELTA_MAX_PERCENT,
            ),
            message=MSG_CAPACITY_DELTA,
        ),
        PolicyShape(
            id="delta-mf-capacity",
            target_class="ManagedFunction",
            constraint=DeltaBound(
                attribute="plannedCapacity",
                min_percent=DELTA_MIN_PERCENT,
                max_percent=DELTA_MAX_PERCENT,
            ),
            message="Adversarial Protection: Managed function capacity change exceeds ±20%",
        ),
    ]


def build_default_corpus() -> PolicySet:
    return PolicySet(_topological() + _resource() + _state() + _temporal() + _delta())


def required_attributes(policy_set: PolicySet, hierarchy: ClassHierarchy, nf_class: str) -> set[str]:
    """Attributes a node of nf_class must carry to conform (fail-closed ranges)."""
    ancestors = set(hierarchy.ancestors(nf_class))
    return {
        shape.constraint.attribute
        for shape in policy_set
        if isinstance(shape.constraint, AttributeRange) and shape.target_class in ancestors
    }
