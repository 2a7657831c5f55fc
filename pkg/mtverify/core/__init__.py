"""Core arithmetic and verification logic"""
