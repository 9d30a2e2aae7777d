from src.core.envelope import Check, MomentDocument, OutputEnvelope

__all__ = ['Check', 'MomentDocument', 'OutputEnvelope']
