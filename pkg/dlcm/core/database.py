from contextlib import contextmanager

from sqlalchemy import create_engine
from sqlalchemy.orm import declarative_base, sessionmaker
from sqlalchemy.pool import StaticPool

from .config import DATABASE_URL

"""
Run registry database configuration
"""

# In-memory SQLite must share one connection across sessions
if DATABASE_URL in ("sqlite://", "sqlite:///:memory:"):
    engine = create_engine(
        DATABASE_URL, connect_args={"check_same_thread": False}, poolclass=StaticPool
    )
elif DATABASE_URL.startswith("sqlite"):
    engine = create_engine(
        DATABASE_URL, connect_args={"check_same_thread": False}
    )
else:
    engine = create_engine(DATABASE_URL, pool_pre_ping=True)

# Records returned by crud stay readable after their session closes
SessionLocal = sessionmaker(autocommit=False, autoflush=False, expire_on_commit=False, bind=engine)

# Base class for registry tables
Base = declarative_base()


@contextmanager
def get_db():
    """Yield a session and always close it"""
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()


def init_registry() -> None:
    """Create registry tables that do not exist yet"""
    # Import tables so they register on Base.metadata
    from .. import records  # noqa: F401

    Base.metadata.create_all(bind=engine)
