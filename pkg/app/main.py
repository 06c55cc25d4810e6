from __future__ import annotations

import logging
import secrets
from datetime import datetime, timezone

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from starlette.middleware.base import BaseHTTPMiddleware
from starlette.middleware.gzip import GZipMiddleware

# Fast JSON (fallback to default if ORJSON not installed)
try:
    from fastapi.responses import ORJSONResponse as FastJSON
    DEFAULT_RESP_CLS = FastJSON
except Exception:
    FastJSON = JSONResponse
    DEFAULT_RESP_CLS = JSONResponse

from .routes.evaluate import router as evaluate_router
from .settings import get_settings

logging.basicConfig(level=getattr(logging, get_settings().log_level, logging.WARNING))
logger = logging.getLogger(__name__)

REQ_ID_HEADER = "X-Request-ID"


class RequestIDMiddleware(BaseHTTPMiddleware):
    async def dispatch(self, request: Request, call_next):
        rid = request.headers.get(REQ_ID_HEADER) or secrets.token_hex(8)
        request.state.request_id = rid
        resp = await call_next(request)
        resp.headers.setdefault(REQ_ID_HEADER, rid)
        return resp


app = FastAPI(
    title="Wachspress interpolation toolkit",
    default_response_class=DEFAULT_RESP_CLS,
)
app.add_middleware(RequestIDMiddleware)
app.add_middleware(GZipMiddleware, minimum_size=512)

app.include_router(evaluate_router)


@app.get("/health")
def health():
    return {"status": "ok", "env": get_settings().app_env, "time": datetime.now(timezone.utc).isoformat()}
