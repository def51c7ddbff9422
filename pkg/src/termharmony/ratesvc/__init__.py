from .service import EventLog, RatingService, ServiceConfig, ServiceError, interleaved_item_order
from .instructions import instructions_payload

__all__ = [
    "EventLog",
    "RatingService",
    "ServiceConfig",
    "ServiceError",
    "interleaved_item_order",
    "instructions_payload",
]
