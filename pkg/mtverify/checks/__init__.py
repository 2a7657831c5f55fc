"""Check handlers"""
