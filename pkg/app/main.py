from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
import uvicorn
import logging
from dotenv import load_dotenv

# Import routers
from app.api import instances, schemes, lp, evaluations, bruteforce, reproduce

from app.core.config import settings
from app.middleware.error_handlers import register_exception_handlers

logging.basicConfig(
    level=settings.LOG_LEVEL,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger("app.main")

load_dotenv()

app = FastAPI(
    title=settings.APP_NAME,
    description="Exact leakage-robust persuasion: schemes, checks, LPs and downstream evaluation",
    version=settings.TOOL_VERSION
)

register_exception_handlers(app)

# Local tool; restrict origins before exposing it
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

api_prefix = settings.API_PREFIX
app.include_router(instances.router, prefix=api_prefix)
app.include_router(schemes.router, prefix=api_prefix)
app.include_router(lp.router, prefix=api_prefix)
app.include_router(evaluations.router, prefix=api_prefix)
app.include_router(bruteforce.router, prefix=api_prefix)
app.include_router(reproduce.router, prefix=api_prefix)


@app.get("/")
async def root():
    return {"message": f"Welcome to {settings.APP_NAME}", "status": "online", "version": settings.TOOL_VERSION}


@app.get("/health")
async def health_check():
    return {"status": "healthy"}


if __name__ == "__main__":
    uvicorn.run("app.main:app", host="0.0.0.0", port=8000, reload=True)
