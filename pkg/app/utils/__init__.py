"""Utilities module for QuasiToda"""
