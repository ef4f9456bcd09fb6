"""Allow running the tool server with: python -m gdtl.mcp"""

from .server import mcp

mcp.run()
