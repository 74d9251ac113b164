from .service import create_app
from .store import TuringSession, TuringStore, aggregate_tables
