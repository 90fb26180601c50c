"""FastAPI surface over the reconstruction core.

Endpoints mirror the CLI subcommands: /phantom, /mask, /recon, /eval, plus
/health. Validation problems map to 422, solver divergence to 409 with a
structured detail so the thin client can exit with the numerical-failure
code.
"""

from __future__ import annotations

import json
from typing import Any

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from .. import __version__
from ..fourier import sos_combine
from ..hankel import HankelConfig
from ..metrics import evaluate
from ..phantom import PhantomSpec, gen_phantom
from ..sampling import gen_cartesian, gen_partial_fourier, gen_uniform
from ..solver import DivergenceError, SolverConfig, recon_image
from ..tensorio import TensorFormatError
from .schemas import (
    EvalRequest,
    EvalResponse,
    MaskModel,
    MaskRequest,
    PhantomRequest,
    PhantomResponse,
    ReconRequest,
    ReconResponse,
    RowReportModel,
    decode_tensor,
    encode_tensor,
)

MODE_NAMES = {"full": "full", "lr": "lowrank_only", "sp": "sparse_only"}


class NumericJSONResponse(JSONResponse):
    """JSON renderer that keeps non-finite floats (Infinity) on the wire."""

    def render(self, content: Any) -> bytes:
        return json.dumps(content, ensure_ascii=False, allow_nan=True, separators=(",", ":")).encode(
            "utf-8"
        )


def _bad_request(err: Exception) -> HTTPException:
    return HTTPException(status_code=422, detail={"error": "validation", "message": str(err)})


def create_app() -> FastAPI:
    app = FastAPI(
        title="mrline",
        version=__version__,
        description="Row-decoupled low-rank + sparse MRI reconstruction service",
        default_response_class=NumericJSONResponse,
    )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/phantom", response_model=PhantomResponse)
    def phantom(req: PhantomRequest) -> PhantomResponse:
        try:
            spec = PhantomSpec(
                m=req.m,
                n=req.n,
                j=req.coils,
                sens_support=req.support,
                n_shapes=req.shapes,
                seed=req.seed,
            )
            truth, kspace = gen_phantom(spec)
        except ValueError as err:
            raise _bad_request(err) from err
        return PhantomResponse(truth=encode_tensor(truth), kspace=encode_tensor(kspace))

    @app.post("/mask", response_model=MaskModel)
    def mask(req: MaskRequest) -> MaskModel:
        try:
            if req.pattern == "cartesian":
                m = gen_cartesian(req.n, req.af, req.center_fraction, req.seed)
            elif req.pattern == "uniform":
                af = int(req.af)
                if af != req.af:
                    raise ValueError(f"uniform pattern needs an integer af, got {req.af}")
                m = gen_uniform(req.n, af, req.acs)
            else:
                m = gen_partial_fourier(req.n, req.fraction, req.af, req.center_fraction, req.seed)
        except ValueError as err:
            raise _bad_request(err) from err
        return MaskModel.from_mask(m)

    @app.post("/recon", response_model=ReconResponse)
    def recon(req: ReconRequest) -> ReconResponse:
        try:
            y = decode_tensor(req.kspace)
            sampling_mask = req.mask.to_mask()
            cfg = SolverConfig(
                lambda1=req.lambda1,
                lambda2=req.lambda2,
                gamma=req.gamma,
                max_iters=req.iters,
                tol=req.tol,
                mode=MODE_NAMES[req.mode],
                hankel=HankelConfig(n=y.shape[1], j=y.shape[2], b=req.filter_len),
                frame_levels=req.levels,
                normalize=req.normalize,
                hard_replace=req.hard_replace,
            )
        except (ValueError, TensorFormatError) as err:
            raise _bad_request(err) from err
        try:
            image, reports = recon_image(y, sampling_mask, cfg, threads=req.threads)
        except DivergenceError as err:
            raise HTTPException(
                status_code=409,
                detail={"error": "divergence", "message": str(err), "row": err.row},
            ) from err
        except ValueError as err:
            raise _bad_request(err) from err
        rows = [
            RowReportModel(
                row=rep.row_index,
                iterations=rep.iterations_run,
                final_change=rep.final_change,
                wall_time=rep.wall_time,
                objective_trace=list(rep.objective_trace) if req.include_traces else None,
            )
            for rep in reports
        ]
        return ReconResponse(image=encode_tensor(image), rows=rows)

    @app.post("/eval", response_model=EvalResponse)
    def eval_images(req: EvalRequest) -> EvalResponse:
        try:
            ref = decode_tensor(req.ref)
            test = decode_tensor(req.test)
            report = evaluate(sos_combine(ref), sos_combine(test))
        except (ValueError, TensorFormatError) as err:
            raise _bad_request(err) from err
        return EvalResponse(rlne=report.rlne, psnr_db=report.psnr_db, ssim=report.ssim)

    return app


app = create_app()
