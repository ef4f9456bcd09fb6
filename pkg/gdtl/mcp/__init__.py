"""GDTL tool server: exposes typechecking, normalization and evaluation as MCP tools."""
