"""All commands known to the front end"""
from typing import Dict

from app.commands.factorization.routes import router as factorization_router
from app.commands.kp.routes import router as kp_router
from app.commands.router import CommandSpec
from app.commands.solitons.routes import router as solitons_router
from app.commands.toda.routes import router as toda_router

ROUTERS = [factorization_router, toda_router, kp_router, solitons_router]

COMMANDS: Dict[str, CommandSpec] = {
    name: spec for router in ROUTERS for name, spec in router.commands.items()
}
